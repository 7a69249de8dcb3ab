#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "lcoal/measure.hpp"

namespace lcoal {

struct RateValue {
  double value = 0.0;
  double error = 0.0;
};

// Quadrature settings used for rate integrals: effectively relative-only, since
// lambda_{b,k} spans hundreds of orders of magnitude.
QuadratureConfig rate_quadrature();

// Closed-form-free integrands of the single-integral rate formulas, stable for
// every x in [0,1]; omx is 1 - x supplied at full precision.
double lambda_integrand(int b, double x, double omx);
double gamma_integrand(int b, double x, double omx);
// C(b,k) x^{k-2} (1-x)^{b-k} for k = 2..b written to out[k]; out[0] = out[1] = 0.
void merge_weights(int b, double x, double omx, double* out);

class RateKernel {
 public:
  explicit RateKernel(LambdaMeasure measure, QuadratureConfig cfg = rate_quadrature());

  const LambdaMeasure& measure() const { return measure_; }
  const QuadratureConfig& config() const { return cfg_; }

  RateValue lambda_bk(int b, int k) const;
  RateValue lambda_total(int b) const;
  RateValue gamma_total(int b) const;
  RateValue eta_total(int b) const;
  // The same totals assembled from the per-(b,k) rates.
  RateValue lambda_total_by_sum(int b) const;
  RateValue gamma_total_by_sum(int b) const;
  // lambda_{b+1} - lambda_b and gamma_{b+1} - gamma_b as single integrals.
  RateValue lambda_increment(int b) const;
  RateValue gamma_increment(int b) const;
  // Integral of 1/x over [eps, 1].
  RateValue inverse_x_integral(double eps) const;
  double lambda22() const { return measure_.total_mass(); }

  // Unnormalized merge-size row mu_{b,k} = C(b,k) lambda_{b,k}, k = 0..b.
  std::vector<double> merge_row(int b) const;
  // Probability vector indexed by k (entries 0 and 1 are zero).
  std::vector<double> merge_size_distribution(int b) const;

  // Tables for b = 0..upto (memoized, safe to call concurrently).
  std::vector<double> lambda_table(int upto) const;
  std::vector<double> gamma_table(int upto) const;
  int b_max() const;
  void precompute(int upto) const;

 private:
  void extend(int upto) const;

  LambdaMeasure measure_;
  QuadratureConfig cfg_;
  mutable std::mutex mu_;
  mutable std::vector<RateValue> lambda_;
  mutable std::vector<RateValue> gamma_;
  mutable std::map<std::pair<int, int>, RateValue> lambda_bk_;
};

using KernelPtr = std::shared_ptr<const RateKernel>;
KernelPtr make_kernel(LambdaMeasure measure, QuadratureConfig cfg = rate_quadrature());

enum class CdiTag { ComesDown, StaysInfinite, Inconclusive };
std::string to_string(CdiTag tag);

struct ClassifierConfig {
  int fit_points = 24;
  double comes_down_ratio = 0.9;  // tail ratio at or below this: summable
  double stays_ratio = 0.99;      // tail ratio at or above this: divergent
  double max_log_b = 300.0;       // extrapolation horizon in log b
};

struct CdiVerdict {
  CdiTag verdict = CdiTag::Inconclusive;
  int b_max = 0;
  double partial_sum = 0.0;     // sum_{b=2}^{b_max} 1/gamma_b
  double tail_estimate = 0.0;   // extrapolated sum over b > b_max (inf if divergent)
  double tail_ratio = 0.0;      // ratio of successive super-decade tail integrals
  std::vector<double> segment_tails;
  double c1 = 0.0, c2 = 0.0;    // fitted coefficients
  double fit_max_rel_residual = 0.0;
  double gamma_over_b = 0.0;    // gamma_{b_max} / b_max
  bool complete_collapse = false;
  std::string rationale;
};

CdiVerdict cdi_classify(const RateKernel& kernel, int b_max, const ClassifierConfig& cfg = {});

struct BoundEstimate {
  double value = 0.0;  // +inf when the coalescent stays infinite
  CdiTag verdict = CdiTag::Inconclusive;
  double partial = 0.0;
  double tail = 0.0;
};

// sum_{b >= k} 1/gamma_b + k/gamma_k, with the tail beyond b_max extrapolated.
BoundEstimate tn_uniform_bound(const RateKernel& kernel, int k, int b_max,
                               const ClassifierConfig& cfg = {});

}  // namespace lcoal
