#include "lcoal/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lcoal/error.hpp"

namespace lcoal {

namespace {

double choose2(int b) { return 0.5 * static_cast<double>(b) * static_cast<double>(b - 1); }

double log_one_minus(double x, double omx) { return x < 0.5 ? std::log1p(-x) : std::log(omx); }

double powz(double x, int e) { return e == 0 ? 1.0 : std::pow(x, e); }

RateValue add(RateValue a, RateValue b) { return {a.value + b.value, a.error + b.error}; }

}  // namespace

QuadratureConfig rate_quadrature() {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-300;
  cfg.rel_tol = 1e-13;
  cfg.max_subdivisions = 100000;
  return cfg;
}

double lambda_integrand(int b, double x, double omx) {
  if (b < 2) return 0.0;
  if (x == 0.0) return choose2(b);
  if (omx == 0.0) return 1.0;
  const double bd = static_cast<double>(b);
  if (bd * x < 1.0) {
    // sum_{k>=2} C(b,k) x^{k-2} (1-x)^{b-k}; the terms shrink geometrically
    double t = choose2(b) * std::exp((bd - 2.0) * log_one_minus(x, omx));
    double s = t;
    const double r = x / omx;
    for (int k = 2; k < b; ++k) {
      t *= static_cast<double>(b - k) / static_cast<double>(k + 1) * r;
      s += t;
      if (t < 1e-18 * s) break;
    }
    return s;
  }
  const double l = log_one_minus(x, omx);
  const double num = -std::expm1(bd * l) - bd * x * std::exp((bd - 1.0) * l);
  return num / (x * x);
}

double gamma_integrand(int b, double x, double omx) {
  if (b < 2) return 0.0;
  if (x == 0.0) return choose2(b);
  if (omx == 0.0) return static_cast<double>(b - 1);
  const double bd = static_cast<double>(b);
  if (bd * x < 1.0) {
    double t = choose2(b) * std::exp((bd - 2.0) * log_one_minus(x, omx));
    double s = t;
    const double r = x / omx;
    for (int k = 2; k < b; ++k) {
      t *= static_cast<double>(b - k) / static_cast<double>(k + 1) * r;
      const double term = t * static_cast<double>(k);  // weight (k+1) - 1
      s += term;
      if (term < 1e-18 * s) break;
    }
    return s;
  }
  // b x >= 1: both summands are nonnegative, no cancellation
  const double num = (bd * x - 1.0) + std::exp(bd * log_one_minus(x, omx));
  return num / (x * x);
}

void merge_weights(int b, double x, double omx, double* out) {
  std::fill(out, out + b + 1, 0.0);
  if (b < 2) return;
  if (x == 0.0) {
    out[2] = choose2(b);
    return;
  }
  if (omx == 0.0) {
    out[b] = 1.0;
    return;
  }
  const double bd = static_cast<double>(b);
  const double lx = std::log(x);
  const double l1 = log_one_minus(x, omx);
  int m = static_cast<int>(std::floor((bd + 1.0) * x));
  m = std::clamp(m, 2, b);
  double logt;
  if (m == 2) {
    logt = std::log(choose2(b)) + (bd - 2.0) * l1;
  } else {
    logt = std::lgamma(bd + 1.0) - std::lgamma(m + 1.0) - std::lgamma(bd - m + 1.0) +
           (m - 2.0) * lx + (bd - m) * l1;
  }
  const double tm = std::exp(logt);
  out[m] = tm;
  const double up = x / omx;
  const double down = omx / x;
  const double floor_rel = 1e-20 * tm;
  double t = tm;
  for (int k = m; k < b; ++k) {
    t *= static_cast<double>(b - k) / static_cast<double>(k + 1) * up;
    if (t < floor_rel || t == 0.0) break;
    out[k + 1] = t;
  }
  t = tm;
  for (int k = m; k > 2; --k) {
    t *= static_cast<double>(k) / static_cast<double>(b - k + 1) * down;
    if (t < floor_rel || t == 0.0) break;
    out[k - 1] = t;
  }
}

RateKernel::RateKernel(LambdaMeasure measure, QuadratureConfig cfg)
    : measure_(std::move(measure)), cfg_(cfg) {
  cfg_.validate();
  if (measure_.is_zero())
    throw Error(ErrorCode::ValidationError, "rate kernel needs Lambda([0,1]) > 0");
}

KernelPtr make_kernel(LambdaMeasure measure, QuadratureConfig cfg) {
  return std::make_shared<const RateKernel>(std::move(measure), cfg);
}

void RateKernel::extend(int upto) const {
  // caller holds mu_
  for (int b = static_cast<int>(lambda_.size()); b <= upto; ++b) {
    if (b < 2) {
      lambda_.push_back({});
      gamma_.push_back({});
      continue;
    }
    auto l = integrate_over([b](double x, double omx) { return lambda_integrand(b, x, omx); },
                            measure_, Interval{}, cfg_);
    auto g = integrate_over([b](double x, double omx) { return gamma_integrand(b, x, omx); },
                            measure_, Interval{}, cfg_);
    lambda_.push_back({l.value, l.error});
    gamma_.push_back({g.value, g.error});
  }
}

void RateKernel::precompute(int upto) const {
  std::lock_guard lock(mu_);
  extend(upto);
}

int RateKernel::b_max() const {
  std::lock_guard lock(mu_);
  return static_cast<int>(lambda_.size()) - 1;
}

RateValue RateKernel::lambda_total(int b) const {
  if (b < 2) return {};
  std::lock_guard lock(mu_);
  extend(b);
  return lambda_[static_cast<std::size_t>(b)];
}

RateValue RateKernel::gamma_total(int b) const {
  if (b < 2) return {};
  std::lock_guard lock(mu_);
  extend(b);
  return gamma_[static_cast<std::size_t>(b)];
}

RateValue RateKernel::eta_total(int b) const { return add(lambda_total(b), gamma_total(b)); }

std::vector<double> RateKernel::lambda_table(int upto) const {
  std::lock_guard lock(mu_);
  extend(upto);
  std::vector<double> out(static_cast<std::size_t>(upto) + 1);
  for (int b = 0; b <= upto; ++b) out[static_cast<std::size_t>(b)] = lambda_[static_cast<std::size_t>(b)].value;
  return out;
}

std::vector<double> RateKernel::gamma_table(int upto) const {
  std::lock_guard lock(mu_);
  extend(upto);
  std::vector<double> out(static_cast<std::size_t>(upto) + 1);
  for (int b = 0; b <= upto; ++b) out[static_cast<std::size_t>(b)] = gamma_[static_cast<std::size_t>(b)].value;
  return out;
}

RateValue RateKernel::lambda_bk(int b, int k) const {
  if (b < 2 || k < 2 || k > b)
    throw Error(ErrorCode::InvalidArgument, "lambda_bk needs 2 <= k <= b");
  {
    std::lock_guard lock(mu_);
    auto it = lambda_bk_.find({b, k});
    if (it != lambda_bk_.end()) return it->second;
  }
  auto r = integrate_over(
      [b, k](double x, double omx) { return powz(x, k - 2) * powz(omx, b - k); }, measure_,
      Interval{}, cfg_);
  RateValue v{r.value, r.error};
  std::lock_guard lock(mu_);
  lambda_bk_.emplace(std::make_pair(b, k), v);
  return v;
}

RateValue RateKernel::lambda_total_by_sum(int b) const {
  if (b < 2) return {};
  long double s = 0.0L, e = 0.0L, c = 1.0L;
  for (int k = 1; k <= b; ++k) {
    c = c * static_cast<long double>(b - k + 1) / static_cast<long double>(k);
    if (k < 2) continue;
    auto v = lambda_bk(b, k);
    s += c * v.value;
    e += c * v.error;
  }
  return {static_cast<double>(s), static_cast<double>(e)};
}

RateValue RateKernel::gamma_total_by_sum(int b) const {
  if (b < 2) return {};
  long double s = 0.0L, e = 0.0L, c = 1.0L;
  for (int k = 1; k <= b; ++k) {
    c = c * static_cast<long double>(b - k + 1) / static_cast<long double>(k);
    if (k < 2) continue;
    auto v = lambda_bk(b, k);
    s += c * (k - 1) * v.value;
    e += c * (k - 1) * v.error;
  }
  return {static_cast<double>(s), static_cast<double>(e)};
}

RateValue RateKernel::lambda_increment(int b) const {
  if (b < 1) return {};
  auto r = integrate_over(
      [b](double, double omx) { return static_cast<double>(b) * powz(omx, b - 1); }, measure_,
      Interval{}, cfg_);
  return {r.value, r.error};
}

RateValue RateKernel::gamma_increment(int b) const {
  if (b < 1) return {};
  auto r = integrate_over(
      [b](double x, double omx) {
        if (x == 0.0) return static_cast<double>(b);
        return -std::expm1(b * log_one_minus(x, omx)) / x;
      },
      measure_, Interval{}, cfg_);
  return {r.value, r.error};
}

RateValue RateKernel::inverse_x_integral(double eps) const {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "inverse_x_integral needs eps > 0");
  auto r = integrate_over([](double x, double) { return 1.0 / x; }, measure_,
                          Interval{eps, 1.0, true, true}, cfg_);
  return {r.value, r.error};
}

std::vector<double> RateKernel::merge_row(int b) const {
  if (b < 2) return std::vector<double>(static_cast<std::size_t>(std::max(b, 0)) + 1, 0.0);
  const auto dim = static_cast<std::size_t>(b) + 1;
  auto r = integrate_vector_over(
      [b](double x, double omx, double* out) { merge_weights(b, x, omx, out); }, dim, measure_,
      cfg_);
  return r.value;
}

std::vector<double> RateKernel::merge_size_distribution(int b) const {
  if (b < 2 || lambda_total(b).value <= 0.0)
    throw Error(ErrorCode::ZeroTotalRate, "merge size law undefined: lambda_b = 0");
  auto row = merge_row(b);
  long double s = 0.0L;
  for (double v : row) s += v;
  for (double& v : row) v = static_cast<double>(v / s);
  return row;
}

std::string to_string(CdiTag tag) {
  switch (tag) {
    case CdiTag::ComesDown: return "COMES_DOWN";
    case CdiTag::StaysInfinite: return "STAYS_INFINITE";
    case CdiTag::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

}  // namespace lcoal
