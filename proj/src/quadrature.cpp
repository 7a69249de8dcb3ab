#include "lcoal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "lcoal/error.hpp"
#include "lcoal/simd/kernels.hpp"

namespace lcoal {

namespace {

constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452912, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd Kronrod nodes 1,3,5,7,9.
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool frozen;
};

Panel gk21(const ScalarIntegrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[10];
  double resg = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  Panel p{a, b, resk * h, std::fabs((resk - resg) * h), false};
  if (!std::isfinite(p.value))
    throw Error(ErrorCode::ToleranceNotMet, "integrand not finite on quadrature panel");
  return p;
}

bool too_narrow(double a, double b) {
  const double c = 0.5 * (a + b);
  return !(c > a && c < b) || (b - a) < 4.0 * std::numeric_limits<double>::denorm_min();
}

std::vector<std::pair<double, double>> initial_panels(double a, double b, const QuadratureConfig& cfg) {
  std::vector<std::pair<double, double>> out;
  if (cfg.rule == SubdivisionRule::Graded && a > 0.0 && b / a > 16.0) {
    double lo = a;
    while (lo * 4.0 < b) {
      out.emplace_back(lo, lo * 4.0);
      lo *= 4.0;
    }
    out.emplace_back(lo, b);
  } else {
    out.emplace_back(a, b);
  }
  return out;
}

[[noreturn]] void tolerance_failure(double value, double error, double target, int n) {
  std::ostringstream os;
  os.precision(17);
  os << "quadrature tolerance not met after " << n << " subdivisions: value " << value
     << ", error " << error << ", target " << target;
  throw Error(ErrorCode::ToleranceNotMet, os.str());
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1)
    throw Error(ErrorCode::ValidationError,
                "quadrature config: tolerances must be > 0 and max_subdivisions >= 1");
}

QuadratureResult integrate_interval(const ScalarIntegrand& f, double a, double b,
                                    const QuadratureConfig& cfg) {
  cfg.validate();
  QuadratureResult res;
  if (!(b > a)) return res;

  auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);
  std::vector<Panel> frozen;
  long evals = 0;
  for (auto [lo, hi] : initial_panels(a, b, cfg)) {
    heap.push(gk21(f, lo, hi));
    evals += 21;
  }
  int splits = 0;

  auto totals = [&]() {
    // Recomputed from scratch so the running sums never drift.
    long double v = 0.0L, e = 0.0L;
    auto copy = heap;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    for (const auto& p : frozen) {
      v += p.value;
      e += p.error;
    }
    return std::pair<double, double>{static_cast<double>(v), static_cast<double>(e)};
  };

  long double value = 0.0L, error = 0.0L;
  {
    auto [v, e] = totals();
    value = v;
    error = e;
  }
  while (true) {
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(static_cast<double>(value)));
    if (static_cast<double>(error) <= target) break;
    if (heap.empty() || splits >= cfg.max_subdivisions) {
      auto [v, e] = totals();
      if (e <= std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(v))) {
        value = v;
        error = e;
        break;
      }
      tolerance_failure(v, e, target, splits);
    }
    Panel worst = heap.top();
    heap.pop();
    if (too_narrow(worst.a, worst.b)) {
      worst.frozen = true;
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    evals += 42;
    ++splits;
    value += (static_cast<long double>(left.value) + right.value) - worst.value;
    error += (static_cast<long double>(left.error) + right.error) - worst.error;
    heap.push(left);
    heap.push(right);
    if (splits % 256 == 0) {
      auto [v, e] = totals();
      value = v;
      error = e;
    }
  }
  auto [v, e] = totals();
  res.value = v;
  res.error = e;
  res.evaluations = evals;
  res.intervals = static_cast<int>(heap.size() + frozen.size());
  return res;
}

VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double a,
                                        double b, const QuadratureConfig& cfg) {
  cfg.validate();
  VectorQuadratureResult res;
  res.value.assign(dim, 0.0);
  if (!(b > a) || dim == 0) return res;

  struct VPanel {
    double a, b, error;
    std::size_t slot;  // offset into storage
  };
  std::vector<double> storage;
  std::vector<std::size_t> free_slots;
  std::vector<double> node(dim), gauss(dim);

  auto alloc = [&]() {
    if (!free_slots.empty()) {
      std::size_t s = free_slots.back();
      free_slots.pop_back();
      std::fill(storage.begin() + static_cast<std::ptrdiff_t>(s),
                storage.begin() + static_cast<std::ptrdiff_t>(s + dim), 0.0);
      return s;
    }
    std::size_t s = storage.size();
    storage.resize(s + dim, 0.0);
    return s;
  };

  auto eval = [&](double lo, double hi) {
    VPanel p{lo, hi, 0.0, alloc()};
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    std::fill(gauss.begin(), gauss.end(), 0.0);
    f(c, node.data());
    simd::axpy(kWgk[10] * h, node.data(), storage.data() + p.slot, dim);
    for (int j = 0; j < 10; ++j) {
      for (double x : {c - h * kXgk[j], c + h * kXgk[j]}) {
        f(x, node.data());
        simd::axpy(kWgk[j] * h, node.data(), storage.data() + p.slot, dim);
        if (j % 2 == 1) simd::axpy(kWg[j / 2] * h, node.data(), gauss.data(), dim);
      }
    }
    p.error = simd::max_abs_diff(storage.data() + p.slot, gauss.data(), dim);
    if (!std::isfinite(p.error))
      throw Error(ErrorCode::ToleranceNotMet, "vector integrand not finite on quadrature panel");
    return p;
  };

  auto cmp = [](const VPanel& x, const VPanel& y) { return x.error < y.error; };
  std::priority_queue<VPanel, std::vector<VPanel>, decltype(cmp)> heap(cmp);
  std::vector<VPanel> frozen;
  for (auto [lo, hi] : initial_panels(a, b, cfg)) heap.push(eval(lo, hi));

  auto totals = [&](std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    double e = 0.0;
    auto copy = heap;
    while (!copy.empty()) {
      simd::axpy(1.0, storage.data() + copy.top().slot, out.data(), dim);
      e += copy.top().error;
      copy.pop();
    }
    for (const auto& p : frozen) {
      simd::axpy(1.0, storage.data() + p.slot, out.data(), dim);
      e += p.error;
    }
    return e;
  };
  auto max_abs = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };

  int splits = 0;
  double error = totals(res.value);
  while (true) {
    const double target = std::max(cfg.abs_tol, cfg.rel_tol * max_abs(res.value));
    if (error <= target) break;
    if (heap.empty() || splits >= cfg.max_subdivisions) tolerance_failure(max_abs(res.value), error, target, splits);
    VPanel worst = heap.top();
    heap.pop();
    if (too_narrow(worst.a, worst.b)) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    free_slots.push_back(worst.slot);
    VPanel left = eval(worst.a, mid);
    VPanel right = eval(mid, worst.b);
    heap.push(left);
    heap.push(right);
    ++splits;
    error += left.error + right.error - worst.error;
    // The value only enters the stopping target, so refresh it in batches.
    if (splits % 16 == 0 || error <= target) error = totals(res.value);
  }
  res.error = totals(res.value);
  res.intervals = static_cast<int>(heap.size() + frozen.size());
  return res;
}

}  // namespace lcoal
