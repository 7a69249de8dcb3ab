#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lcoal/error.hpp"
#include "lcoal/quadrature.hpp"

using namespace lcoal;

TEST_CASE("smooth integrals") {
  const auto r = integrate_interval([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, {});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.error <= 1e-10);
  CHECK(integrate_interval([](double x) { return std::exp(x); }, 0.0, 1.0, {}).value ==
        doctest::Approx(std::numbers::e - 1.0).epsilon(1e-13));
}

TEST_CASE("integrable endpoint singularities") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-11;
  CHECK(integrate_interval([](double x) { return std::log(x); }, 0.0, 1.0, cfg).value ==
        doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(integrate_interval([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, cfg).value ==
        doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("vector integrand") {
  const auto r = integrate_vector(
      [](double x, double* out) {
        out[0] = 1.0;
        out[1] = x;
        out[2] = x * x;
      },
      3, 0.0, 1.0, {});
  REQUIRE(r.value.size() == 3);
  CHECK(r.value[0] == doctest::Approx(1.0));
  CHECK(r.value[1] == doctest::Approx(0.5));
  CHECK(r.value[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tolerance failures and bad configs") {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 3;
  cfg.abs_tol = 1e-15;
  cfg.rel_tol = 1e-15;
  try {
    integrate_interval([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg);
    FAIL("expected TOLERANCE_NOT_MET");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ToleranceNotMet);
  }
  QuadratureConfig bad;
  bad.rel_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
