#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "lcoal/error.hpp"
#include "lcoal/geometry.hpp"

using namespace lcoal;

TEST_CASE("torus N=1 d=3") {
  const auto t = build_torus(1, WalkSpec::simple(3));
  REQUIRE(t.sites() == 27);
  for (int s = 0; s < 27; ++s) {
    CHECK(t.row(s).size() == 6);
    for (const auto& e : t.row(s)) CHECK(e.p == doctest::Approx(1.0 / 6.0));
  }
  CHECK(t.coords(0) == std::vector<int>{-1, -1, -1});
  CHECK(t.site_of({0, 0, 0}) == 13);
  CHECK(t.site_of({2, 0, 0}) == t.site_of({-1, 0, 0}));
}

TEST_CASE("one-dimensional cycle") {
  const auto t = build_torus(1, WalkSpec::simple(1));
  REQUIRE(t.sites() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(t.row(s).size() == 2);
    CHECK(t.p(s, (s + 1) % 3) == 0.5);
    CHECK(t.self_probability(s) == 0.0);
  }
}

TEST_CASE("torus kernels are doubly stochastic") {
  WalkSpec lazy;
  lazy.dim = 3;
  lazy.steps = {{0, 0, 0}, {2, 0, 0}, {-2, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}, {1, 1, 1}};
  lazy.probs = {0.3, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1};
  for (int N : {1, 2, 3}) {
    const auto t = build_torus(N, lazy);
    std::vector<double> col(static_cast<std::size_t>(t.sites()), 0.0);
    for (int s = 0; s < t.sites(); ++s) {
      double r = 0;
      for (const auto& e : t.row(s)) {
        r += e.p;
        col[static_cast<std::size_t>(e.to)] += e.p;
      }
      CHECK(std::fabs(r - 1.0) <= 1e-12);
    }
    for (double c : col) CHECK(std::fabs(c - 1.0) <= 1e-12);
  }
}

TEST_CASE("size overflow") {
  try {
    build_torus(50, WalkSpec::simple(3), 1000);
    FAIL("expected SIZE_OVERFLOW");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeOverflow);
  }
}

TEST_CASE("walk validation") {
  WalkSpec w;
  w.dim = 3;
  w.steps = {{1, 0, 0}, {-1, 0, 0}};
  w.probs = {0.5, 0.5};
  CHECK_THROWS_AS(w.validate(), Error);  // spans only one axis
  w = WalkSpec::simple(3);
  w.probs[0] = 0.5;
  CHECK_THROWS_AS(w.validate(), Error);
}

TEST_CASE("rows are validated by name") {
  try {
    GeographySpec::from_rows({{{1, 1.0}}, {{0, 0.7}}});
    FAIL("expected VALIDATION_ERROR");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
  const auto g = GeographySpec::complete_graph(4);
  CHECK(g.p(0, 0) == 0.0);
  CHECK(g.p(0, 3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("return probabilities") {
  const auto p = return_probabilities(WalkSpec::simple(3), 4);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  CHECK(p[2] == doctest::Approx(1.0 / 6.0));
  CHECK(p[3] == 0.0);
  // 90 closed 4-step paths out of 6^4.
  CHECK(p[4] == doctest::Approx(90.0 / 1296.0));
}

TEST_CASE("Green function") {
  const auto g3 = green_function(WalkSpec::simple(3), {});
  CHECK(g3.estimate == doctest::Approx(1.516386059).epsilon(1e-6));
  CHECK(std::fabs(g3.estimate - 1.516386059) <= g3.error + 1e-9);
  CHECK(g3.estimate >= 1.0);
  const auto g5 = green_function(WalkSpec::simple(5), {});
  CHECK(g5.estimate < g3.estimate);
  GreenOptions mc;
  mc.method = GreenMethod::MonteCarlo;
  mc.replicas = 20000;
  mc.horizon = 400;
  const auto gm = green_function(WalkSpec::simple(3), mc);
  CHECK(std::fabs(gm.estimate - g3.estimate) <= gm.error + g3.error);
  try {
    green_function(WalkSpec::simple(2), {});
    FAIL("expected DIMENSION_TOO_LOW");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionTooLow);
  }
}

TEST_CASE("kappa") {
  CHECK(kappa(3.0, 2.0) == 0.5);
  CHECK(kappa(1.5163860602, 1.0) == doctest::Approx(0.5688).epsilon(1e-4));
  CHECK(std::fabs(kappa(2.0, 1e6) - 1.0) <= 1e-5);
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(1.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double G = u(g), l = u(g), dl = u(g) * 0.1;
    CHECK(kappa(G, l + dl) > kappa(G, l));
    CHECK(kappa(G + dl, l) < kappa(G, l));
  }
}
