#include "lcoal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/chi_squared.hpp>

#include "lcoal/error.hpp"

namespace lcoal {

MeanEstimate mean_estimate(const std::vector<double>& xs) {
  MeanEstimate m;
  m.n = static_cast<long>(xs.size());
  if (xs.empty()) return m;
  // Welford, in input order so results are reproducible.
  double mean = 0.0, m2 = 0.0;
  long k = 0;
  for (double x : xs) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  m.mean = mean;
  if (k > 1) m.standard_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
  return m;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(ErrorCode::InvalidArgument, "KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-transformed series, fast for small lambda.
    const double c = -std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int j = 1; j <= 20; ++j) s += std::exp(c * (2 * j - 1) * (2 * j - 1));
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    s += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

double ks_pvalue(double d, long n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

ChiSquareResult chi_square_test(const std::vector<double>& observed, const std::vector<double>& probs,
                                double min_expected) {
  if (observed.size() != probs.size()) throw Error(ErrorCode::InvalidArgument, "chi-square size mismatch");
  double total = 0.0;
  for (double o : observed) total += o;
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "chi-square with no observations");

  std::vector<double> obs, exp;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += probs[i] * total;
    if (e_acc >= min_expected) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }

  ChiSquareResult r;
  r.cells = static_cast<int>(obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (exp[i] <= 0.0) {
      if (obs[i] > 0.0) r.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  r.dof = r.cells - 1;
  if (r.dof < 1) {
    r.p_value = 1.0;
    return r;
  }
  if (!std::isfinite(r.statistic)) {
    r.p_value = 0.0;
    return r;
  }
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  const std::size_t n = std::max(p.size(), q.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = i < p.size() ? p[i] : 0.0;
    const double b = i < q.size() ? q[i] : 0.0;
    s += std::fabs(a - b);
  }
  return 0.5 * s;
}

std::vector<double> empirical_distribution(const std::vector<int>& outcomes, std::size_t support) {
  std::size_t n = support;
  for (int o : outcomes) {
    if (o < 0) throw Error(ErrorCode::InvalidArgument, "negative outcome in empirical distribution");
    n = std::max(n, static_cast<std::size_t>(o) + 1);
  }
  std::vector<double> d(n, 0.0);
  if (outcomes.empty()) return d;
  for (int o : outcomes) d[static_cast<std::size_t>(o)] += 1.0;
  for (double& x : d) x /= static_cast<double>(outcomes.size());
  return d;
}

}  // namespace lcoal
