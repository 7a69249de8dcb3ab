#include <doctest.h>

#include <cmath>
#include <vector>

#include "lcoal/error.hpp"
#include "lcoal/merge_table.hpp"
#include "lcoal/rates.hpp"

using namespace lcoal;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

std::vector<LambdaMeasure> suite() {
  return {LambdaMeasure::kingman(), LambdaMeasure::lebesgue(), LambdaMeasure::beta(0.5, 1.5),
          LambdaMeasure::beta(1.5, 0.5), LambdaMeasure::atom(0.5)};
}

}  // namespace

TEST_CASE("lambda_bk closed forms") {
  RateKernel kingman(LambdaMeasure::kingman());
  CHECK(kingman.lambda_bk(7, 2).value == 1.0);
  CHECK(kingman.lambda_bk(7, 3).value == 0.0);
  RateKernel leb(LambdaMeasure::lebesgue());
  CHECK(leb.lambda_bk(3, 2).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(leb.lambda_bk(3, 3).value == doctest::Approx(0.5).epsilon(1e-12));
  // (k-2)! (b-k)! / (b-1)!
  CHECK(leb.lambda_bk(6, 4).value == doctest::Approx(2.0 * 2.0 / 120.0).epsilon(1e-12));
  RateKernel one(LambdaMeasure::atom(1.0));
  CHECK(one.lambda_bk(4, 4).value == 1.0);
  CHECK(one.lambda_bk(4, 2).value == 0.0);
  CHECK(one.lambda_bk(4, 3).value == 0.0);
}

TEST_CASE("totals and conventions") {
  RateKernel kingman(LambdaMeasure::kingman());
  CHECK(kingman.lambda_total(5).value == doctest::Approx(10.0));
  CHECK(kingman.gamma_total(6).value == doctest::Approx(15.0));
  CHECK(kingman.lambda_total(1).value == 0.0);
  CHECK(kingman.gamma_total(0).value == 0.0);
  RateKernel leb(LambdaMeasure::lebesgue());
  CHECK(leb.lambda_total(3).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(leb.gamma_total(3).value == doctest::Approx(2.5).epsilon(1e-12));
  RateKernel one(LambdaMeasure::atom(1.0));
  CHECK(one.lambda_total(9).value == doctest::Approx(1.0));
  CHECK(one.gamma_total(9).value == doctest::Approx(8.0));
  // eta_b = sum C(b,k) k lambda_{b,k} = gamma_b + lambda_b
  for (int b : {2, 5, 30})
    CHECK(leb.eta_total(b).value == doctest::Approx(leb.gamma_total(b).value + leb.lambda_total(b).value));
}

TEST_CASE("sum and integral forms agree") {
  for (const auto& m : suite()) {
    RateKernel k(m);
    for (int b : {2, 3, 10, 57, 200}) {
      CAPTURE(b);
      CHECK(rel(k.lambda_total_by_sum(b).value, k.lambda_total(b).value) <= 1e-10);
      CHECK(rel(k.gamma_total_by_sum(b).value, k.gamma_total(b).value) <= 1e-10);
    }
  }
}

TEST_CASE("Pascal consistency") {
  for (const auto& m : suite()) {
    RateKernel k(m);
    for (int b = 2; b <= 30; ++b)
      for (int j = 2; j <= b; ++j) {
        const double lhs = k.lambda_bk(b, j).value;
        const double rhs = k.lambda_bk(b + 1, j).value + k.lambda_bk(b + 1, j + 1).value;
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(lhs, 1e-300));
      }
  }
}

TEST_CASE("merge-size distribution") {
  auto p = RateKernel(LambdaMeasure::kingman()).merge_size_distribution(5);
  CHECK(p[2] == 1.0);
  p = RateKernel(LambdaMeasure::lebesgue()).merge_size_distribution(3);
  CHECK(p[2] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p[3] == doctest::Approx(0.25).epsilon(1e-12));
  p = RateKernel(LambdaMeasure::atom(1.0)).merge_size_distribution(4);
  CHECK(p[4] == doctest::Approx(1.0));
  RateKernel beta(LambdaMeasure::beta(0.5, 1.5));
  p = beta.merge_size_distribution(40);
  double s = 0;
  for (double x : p) s += x;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  // The zero measure is rejected outright; lambda_1 = 0 has no merge law.
  CHECK_THROWS_AS(RateKernel(restrict(LambdaMeasure::atom(1.0), 0.5)), Error);
  try {
    beta.merge_size_distribution(1);
    FAIL("expected ZERO_TOTAL_RATE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroTotalRate);
  }
}

TEST_CASE("merge table matches the direct law") {
  for (const auto& m : suite()) {
    auto kernel = make_kernel(m);
    MergeLaw law(kernel, 8);
    for (int b : {2, 3, 9, 40, 150}) {
      auto table = law.table_for(b);
      REQUIRE(table->capacity() >= b);
      const auto direct = kernel->merge_size_distribution(b);
      for (int k = 2; k <= b; ++k)
        CHECK(std::fabs(table->probability(b, k) - direct[static_cast<std::size_t>(k)]) <= 1e-10);
      CHECK(table->sample(b, 0.0) >= 2);
      CHECK(table->sample(b, 0.999999999) <= b);
    }
  }
}

TEST_CASE("classifier verdicts") {
  CHECK(cdi_classify(RateKernel(LambdaMeasure::kingman()), 2000).verdict == CdiTag::ComesDown);
  CHECK(cdi_classify(RateKernel(LambdaMeasure::lebesgue()), 2000).verdict == CdiTag::StaysInfinite);
  CHECK(cdi_classify(RateKernel(LambdaMeasure::beta_alpha(1.5)), 2000).verdict == CdiTag::ComesDown);
  const auto one = cdi_classify(RateKernel(LambdaMeasure::atom(1.0)), 200);
  CHECK(one.verdict == CdiTag::ComesDown);
  CHECK(one.complete_collapse);
  const auto half = cdi_classify(RateKernel(LambdaMeasure::atom(0.5)), 2000);
  CHECK(half.verdict == CdiTag::StaysInfinite);
}

TEST_CASE("partial sums are nondecreasing in b_max") {
  RateKernel k(LambdaMeasure::beta_alpha(1.25));
  double prev = 0.0;
  for (int b : {100, 200, 400, 800}) {
    const auto v = cdi_classify(k, b);
    CHECK(v.partial_sum >= prev);
    prev = v.partial_sum;
  }
}

TEST_CASE("uniform bound") {
  RateKernel kingman(LambdaMeasure::kingman());
  CHECK(tn_uniform_bound(kingman, 2, 2000).value == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(tn_uniform_bound(kingman, 4, 2000).value == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(std::isinf(tn_uniform_bound(RateKernel(LambdaMeasure::lebesgue()), 3, 2000).value));
  // gamma_k > 0 for every k >= 2 once the measure is nonzero, so only k < 2 can fail.
  CHECK_THROWS_AS(tn_uniform_bound(kingman, 1, 200), Error);
}

TEST_CASE("memoized tables are consistent with direct queries") {
  RateKernel k(LambdaMeasure::beta(1.5, 0.5));
  const auto lam = k.lambda_table(300);
  const auto gam = k.gamma_table(300);
  CHECK(k.b_max() >= 300);
  for (int b : {0, 1, 2, 17, 300}) {
    CHECK(lam[static_cast<std::size_t>(b)] == k.lambda_total(b).value);
    CHECK(gam[static_cast<std::size_t>(b)] == k.gamma_total(b).value);
  }
}
