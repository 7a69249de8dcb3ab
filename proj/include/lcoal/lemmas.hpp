#pragma once

#include <string>
#include <vector>

#include "lcoal/rates.hpp"

namespace lcoal {

// One inequality lhs >= rhs; margin = lhs - rhs.
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
};

// Relative slack allowed for quadrature noise in rate inequalities.
inline constexpr double kRateSlack = 1e-10;

InequalityCheck check_geq(std::string name, double lhs, double rhs, double rel_slack = kRateSlack);

// Site-count sandwich for gamma and lambda sums:
//   gamma_{sum b} >= sum gamma_{b_i} >= v gamma_{floor(sum b / v)}
//   v^{1+rho} lambda_{ceil(sum b / v)} >= sum lambda_{b_i} >= lambda_{ceil(sum b / v)}
CheckReport spatial_rate_bounds_check(const RateKernel& kernel, const std::vector<int>& site_counts,
                                      double rho_hat);

// max over 2 <= m < b <= b_max of log(lambda_b / lambda_{ceil(b/m)}) / log m, plus margin.
double estimate_rho(const RateKernel& kernel, int b_max, double margin = 0.5);

// Weighted hitting-time sum for block-count decrements j_1..j_k starting at m
// blocks on v sites, and its deterministic upper bound.
bool decrement_sequence_valid(int v, int m, const std::vector<int>& j);
double decrement_sum(const std::vector<double>& gamma, int v, int m, const std::vector<int>& j);
double decrement_bound(const std::vector<double>& gamma, int v, int m);
// Exact maximum of decrement_sum over all valid sequences (dynamic programming).
double decrement_sum_max(const std::vector<double>& gamma, int v, int m);
// Same maximum by listing every composition; only for small m.
double decrement_sum_max_enumerate(const std::vector<double>& gamma, int v, int m);

}  // namespace lcoal
