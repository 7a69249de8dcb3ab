#include "lcoal/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "lcoal/error.hpp"

namespace lcoal {

bool CheckReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

InequalityCheck check_geq(std::string name, double lhs, double rhs, double rel_slack) {
  InequalityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.margin = lhs - rhs;
  c.pass = c.margin >= -rel_slack * std::max(std::fabs(lhs), std::fabs(rhs));
  return c;
}

CheckReport spatial_rate_bounds_check(const RateKernel& kernel, const std::vector<int>& site_counts,
                                      double rho_hat) {
  const int v = static_cast<int>(site_counts.size());
  if (v < 1) throw Error(ErrorCode::InvalidArgument, "need at least one site");
  long total = 0;
  for (int b : site_counts) {
    if (b < 0) throw Error(ErrorCode::InvalidArgument, "site counts must be >= 0");
    total += b;
  }
  if (total <= v) throw Error(ErrorCode::InvalidArgument, "need sum of site counts > number of sites");
  const int B = static_cast<int>(total);
  const int fl = B / v;
  const int ce = (B + v - 1) / v;
  double gsum = 0.0, lsum = 0.0;
  for (int b : site_counts) {
    gsum += kernel.gamma_total(b).value;
    lsum += kernel.lambda_total(b).value;
  }
  CheckReport r;
  r.checks.push_back(check_geq("gamma_total >= gamma_sum", kernel.gamma_total(B).value, gsum));
  r.checks.push_back(check_geq("gamma_sum >= v gamma_floor", gsum, v * kernel.gamma_total(fl).value));
  const double lce = kernel.lambda_total(ce).value;
  r.checks.push_back(check_geq("v^(1+rho) lambda_ceil >= lambda_sum", std::pow(v, 1.0 + rho_hat) * lce, lsum));
  r.checks.push_back(check_geq("lambda_sum >= lambda_ceil", lsum, lce));
  return r;
}

double estimate_rho(const RateKernel& kernel, int b_max, double margin) {
  const auto lam = kernel.lambda_table(b_max);
  double best = 0.0;
  for (int b = 3; b <= b_max; ++b) {
    for (int m = 2; m < b; ++m) {
      const int c = (b + m - 1) / m;
      if (c < 2) continue;
      const double r = std::log(lam[static_cast<std::size_t>(b)] / lam[static_cast<std::size_t>(c)]) / std::log(m);
      best = std::max(best, r);
    }
  }
  return best + margin;
}

bool decrement_sequence_valid(int v, int m, const std::vector<int>& j) {
  if (j.empty()) return false;
  long prefix = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] < 1) return false;
    if (i + 1 < j.size()) {
      prefix += j[i];
      if (prefix >= m - 2L * v) return false;
    }
  }
  const long total = prefix + j.back();
  return total >= m - 2L * v && total <= m - 1;
}

double decrement_sum(const std::vector<double>& gamma, int v, int m, const std::vector<int>& j) {
  double s = 0.0;
  long prefix = 0;
  for (int x : j) {
    s += x / gamma[static_cast<std::size_t>((m - prefix) / v)];
    prefix += x;
  }
  return s;
}

double decrement_bound(const std::vector<double>& gamma, int v, int m) {
  const int n = m / v;
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "decrement bound needs m >= 2v");
  double s = static_cast<double>(m - n * v) / gamma[static_cast<std::size_t>(n)];
  for (int b = 2; b <= n - 1; ++b) s += v / gamma[static_cast<std::size_t>(b)];
  return s + 2.0 * v / gamma[2];
}

double decrement_sum_max(const std::vector<double>& gamma, int v, int m) {
  const int stop = m - 2 * v;  // prefixes must stay below this before the last step
  if (stop <= 0) throw Error(ErrorCode::InvalidArgument, "need m > 2v");
  std::vector<double> best(static_cast<std::size_t>(stop), 0.0);
  for (int s = stop - 1; s >= 0; --s) {
    const double w = 1.0 / gamma[static_cast<std::size_t>((m - s) / v)];
    double top = 0.0;
    for (int t = s + 1; t <= m - 1; ++t) {
      const double val = (t - s) * w + (t < stop ? best[static_cast<std::size_t>(t)] : 0.0);
      top = std::max(top, val);
    }
    best[static_cast<std::size_t>(s)] = top;
  }
  return best[0];
}

double decrement_sum_max_enumerate(const std::vector<double>& gamma, int v, int m) {
  if (m > 22) throw Error(ErrorCode::InvalidArgument, "enumeration limited to m <= 22");
  double best = 0.0;
  std::vector<int> seq;
  std::function<void(int)> rec = [&](int prefix) {
    for (int j = 1; prefix + j <= m - 1; ++j) {
      seq.push_back(j);
      if (decrement_sequence_valid(v, m, seq)) best = std::max(best, decrement_sum(gamma, v, m, seq));
      if (prefix + j < m - 2 * v) rec(prefix + j);
      seq.pop_back();
    }
  };
  rec(0);
  return best;
}

}  // namespace lcoal
