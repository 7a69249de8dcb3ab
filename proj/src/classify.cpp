#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lcoal/error.hpp"
#include "lcoal/rates.hpp"

namespace lcoal {

namespace {

struct Fit {
  double c1 = 0.0, c2 = 0.0, max_rel = 0.0;
};

// Weighted least squares of gamma ~ c1 A + c2 B with relative residuals,
// coefficients constrained to be nonnegative.
Fit fit_model(const std::vector<double>& A, const std::vector<double>& B,
              const std::vector<double>& g) {
  double saa = 0, sab = 0, sbb = 0, sag = 0, sbg = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double a = A[i] / g[i], b = B[i] / g[i];
    saa += a * a;
    sab += a * b;
    sbb += b * b;
    sag += a;
    sbg += b;
  }
  auto residual = [&](double c1, double c2) {
    double m = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = (c1 * A[i] + c2 * B[i]) / g[i] - 1.0;
      m = std::max(m, std::fabs(r));
      ss += r * r;
    }
    return std::pair<double, double>{ss, m};
  };
  std::vector<std::pair<double, double>> candidates;
  const double det = saa * sbb - sab * sab;
  if (std::fabs(det) > 1e-14 * saa * sbb) {
    const double c1 = (sag * sbb - sbg * sab) / det;
    const double c2 = (sbg * saa - sag * sab) / det;
    if (c1 >= 0.0 && c2 >= 0.0) candidates.emplace_back(c1, c2);
  }
  if (saa > 0.0) candidates.emplace_back(sag / saa, 0.0);
  if (sbb > 0.0) candidates.emplace_back(0.0, sbg / sbb);
  Fit best;
  double best_ss = std::numeric_limits<double>::infinity();
  for (auto [c1, c2] : candidates) {
    auto [ss, m] = residual(c1, c2);
    if (ss < best_ss) {
      best_ss = ss;
      best = {c1, c2, m};
    }
  }
  return best;
}

}  // namespace

CdiVerdict cdi_classify(const RateKernel& kernel, int b_max, const ClassifierConfig& cfg) {
  if (b_max < 100) throw Error(ErrorCode::InvalidArgument, "cdi_classify needs b_max >= 100");
  CdiVerdict v;
  v.b_max = b_max;
  const auto gamma = kernel.gamma_table(b_max);
  long double partial = 0.0L;
  for (int b = 2; b <= b_max; ++b) partial += 1.0L / gamma[static_cast<std::size_t>(b)];
  v.partial_sum = static_cast<double>(partial);
  v.gamma_over_b = gamma[static_cast<std::size_t>(b_max)] / b_max;
  v.complete_collapse = kernel.measure().has_atom_at_one();

  QuadratureConfig qc;
  qc.abs_tol = 1e-300;
  qc.rel_tol = 1e-10;
  const auto& measure = kernel.measure();
  auto small_mass = [&](double eps) {
    return integrate_over([](double, double) { return 1.0; }, measure, Interval{0.0, eps}, qc).value;
  };
  auto inv_x = [&](double eps) {
    return integrate_over([](double x, double) { return 1.0 / x; }, measure, Interval{eps, 1.0}, qc).value;
  };

  // Fit over the top decade on a log grid.
  std::vector<double> A, B, G;
  int last = -1;
  const int pts = std::max(cfg.fit_points, 3);
  for (int j = 0; j < pts; ++j) {
    const double lb = std::log(b_max / 10.0) + std::log(10.0) * j / (pts - 1);
    const int b = std::clamp(static_cast<int>(std::lround(std::exp(lb))), 2, b_max);
    if (b == last) continue;
    last = b;
    const double bd = b;
    A.push_back(bd * bd * small_mass(1.0 / bd));
    B.push_back(bd * inv_x(1.0 / bd));
    G.push_back(gamma[static_cast<std::size_t>(b)]);
  }
  Fit fit = fit_model(A, B, G);
  v.c1 = fit.c1;
  v.c2 = fit.c2;
  v.fit_max_rel_residual = fit.max_rel;

  // Tail sum over b > b_max as an integral in v = log b, split into segments
  // whose endpoints double in v (b squares from one to the next).
  auto inv_density = [&](double lv) {
    const double eps = std::exp(-lv);
    const double d = fit.c1 * std::exp(lv) * small_mass(eps) + fit.c2 * inv_x(eps);
    return d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
  };
  QuadratureConfig tc;
  tc.abs_tol = 1e-300;
  tc.rel_tol = 1e-8;
  tc.max_subdivisions = 2000;
  double lo = std::log(b_max + 0.5);
  bool finite = true;
  while (lo * 2.0 <= cfg.max_log_b) {
    double t;
    try {
      t = integrate_interval(inv_density, lo, 2.0 * lo, tc).value;
    } catch (const Error&) {
      finite = false;
      break;
    }
    v.segment_tails.push_back(t);
    lo *= 2.0;
  }
  std::ostringstream why;
  why.precision(6);
  if (!finite || v.segment_tails.size() < 2) {
    v.tail_ratio = std::numeric_limits<double>::quiet_NaN();
    v.tail_estimate = std::numeric_limits<double>::infinity();
    v.verdict = CdiTag::Inconclusive;
    why << "tail extrapolation failed";
  } else {
    const auto n = v.segment_tails.size();
    v.tail_ratio = v.segment_tails[n - 1] / v.segment_tails[n - 2];
    long double tail = 0.0L;
    for (double t : v.segment_tails) tail += t;
    const double r = v.tail_ratio;
    if (r <= cfg.comes_down_ratio) {
      v.verdict = CdiTag::ComesDown;
      v.tail_estimate = static_cast<double>(tail) + v.segment_tails.back() * r / (1.0 - r);
      why << "fitted tail segments shrink by factor " << r << "; sum of 1/gamma_b converges";
    } else if (r >= cfg.stays_ratio) {
      v.verdict = CdiTag::StaysInfinite;
      v.tail_estimate = std::numeric_limits<double>::infinity();
      why << "fitted tail segments do not shrink (ratio " << r << "); sum of 1/gamma_b diverges";
    } else {
      v.verdict = CdiTag::Inconclusive;
      v.tail_estimate = r < 1.0 ? static_cast<double>(tail) + v.segment_tails.back() * r / (1.0 - r)
                                : std::numeric_limits<double>::infinity();
      why << "tail ratio " << r << " is within 10% of the divergence boundary";
    }
  }
  why << "; fit gamma_b ~ " << v.c1 << " b^2 Lambda[0,1/b] + " << v.c2
      << " b int_[1/b,1] dLambda/x (max rel residual " << v.fit_max_rel_residual << ")";
  if (v.complete_collapse) {
    v.verdict = CdiTag::ComesDown;
    why << "; atom at 1: COMPLETE_COLLAPSE";
  }
  v.rationale = why.str();
  return v;
}

BoundEstimate tn_uniform_bound(const RateKernel& kernel, int k, int b_max,
                               const ClassifierConfig& cfg) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "tn_uniform_bound needs k >= 2");
  const double gk = kernel.gamma_total(k).value;
  if (!(gk > 0.0)) throw Error(ErrorCode::ZeroRate, "gamma_k = 0");
  BoundEstimate out;
  auto verdict = cdi_classify(kernel, std::max(b_max, k + 100), cfg);
  out.verdict = verdict.verdict;
  const auto gamma = kernel.gamma_table(verdict.b_max);
  long double partial = 0.0L;
  for (int b = k; b <= verdict.b_max; ++b) partial += 1.0L / gamma[static_cast<std::size_t>(b)];
  out.partial = static_cast<double>(partial);
  out.tail = verdict.tail_estimate;
  if (verdict.verdict == CdiTag::StaysInfinite || !std::isfinite(out.tail)) {
    out.value = std::numeric_limits<double>::infinity();
  } else {
    out.value = out.partial + out.tail + k / gk;
  }
  return out;
}

}  // namespace lcoal
