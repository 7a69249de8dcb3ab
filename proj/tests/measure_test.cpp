#include <doctest.h>

#include <boost/math/special_functions/beta.hpp>

#include "lcoal/error.hpp"
#include "lcoal/measure.hpp"

using namespace lcoal;

TEST_CASE("mass on intervals") {
  CHECK(mass(LambdaMeasure::atom(1.0), {0.0, 1.0}) == 1.0);
  CHECK(mass(LambdaMeasure::lebesgue(), {0.0, 0.25}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mass(LambdaMeasure::beta(0.5, 1.5), {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(LambdaMeasure::beta(0.5, 1.5).total_mass() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(LambdaMeasure::beta_alpha(1.5) == LambdaMeasure::beta(0.5, 1.5));
}

TEST_CASE("integrate against atoms and densities") {
  const auto one = [](double) { return 1.0; };
  CHECK(integrate(one, LambdaMeasure::lebesgue()).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return x; }, LambdaMeasure::atom(0.0)).value == 0.0);
  CHECK(integrate([](double x) { return 1.0 - x; }, LambdaMeasure::lebesgue()).value ==
        doctest::Approx(0.5).epsilon(1e-12));
  // 0^0 = 1 at the atom.
  CHECK(integrate([](double x) { return x == 0.0 ? 1.0 : 0.0; }, LambdaMeasure::atom(0.0, 2.0)).value == 2.0);
}

TEST_CASE("restrict") {
  const auto r = restrict(LambdaMeasure::lebesgue(), 0.5);
  CHECK(r.total_mass() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(restrict(LambdaMeasure::atom(1.0), 0.5).is_zero());
  const double cdf = boost::math::ibeta(0.5, 1.5, 0.9);
  CHECK(restrict(LambdaMeasure::beta(0.5, 1.5), 0.9).total_mass() == doctest::Approx(cdf).epsilon(1e-9));
  CHECK(mass(restrict(LambdaMeasure::beta(1.5, 0.5), 0.3), {0.0, 1.0}) ==
        doctest::Approx(mass(LambdaMeasure::beta(1.5, 0.5), {0.0, 0.3})).epsilon(1e-9));
}

TEST_CASE("additivity and linearity") {
  const LambdaMeasure m({{0.3, 0.2}, {1.0, 0.1}}, {DensityPiece{}});
  CHECK(m.total_mass() == doctest::Approx(1.3));
  CHECK(m.has_atom_at_one());
  CHECK_FALSE(m.has_atom_at_zero());
  for (double c : {0.1, 0.3, 0.5, 0.99}) {
    const double left = mass(m, {0.0, c});
    const double right = mass(m, {c, 1.0, false, true});
    CHECK(left + right == doctest::Approx(m.total_mass()).epsilon(1e-10));
  }
  const auto f = [](double x) { return x * x; };
  const auto g = [](double x) { return std::sqrt(x); };
  const auto beta = LambdaMeasure::beta(0.5, 1.5);
  const double fg = integrate([&](double x) { return f(x) + g(x); }, beta).value;
  CHECK(fg == doctest::Approx(integrate(f, beta).value + integrate(g, beta).value).epsilon(1e-10));
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(LambdaMeasure({{1.5, 1.0}}, {}), Error);
  CHECK_THROWS_AS(LambdaMeasure({{0.5, 1.0}, {0.5, 2.0}}, {}), Error);
  CHECK_THROWS_AS(LambdaMeasure({{0.5, -1.0}}, {}), Error);
  DensityPiece neg;
  neg.value = -1.0;
  CHECK_THROWS_AS(LambdaMeasure({}, {neg}), Error);
  CHECK(LambdaMeasure().is_zero());
}

TEST_CASE("polynomial and power densities") {
  DensityPiece poly;
  poly.kind = DensityKind::Polynomial;
  poly.coeffs = {1.0, 2.0};  // 1 + 2x on [0,1] -> mass 2
  CHECK(LambdaMeasure({}, {poly}).total_mass() == doctest::Approx(2.0));
  DensityPiece pw;
  pw.kind = DensityKind::Power;
  pw.p = 1.0;
  pw.q = 1.0;
  pw.scale = 6.0;  // 6 x (1-x) -> mass 1
  CHECK(LambdaMeasure({}, {pw}).total_mass() == doctest::Approx(1.0));
}
