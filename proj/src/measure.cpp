#include "lcoal/measure.hpp"

#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <sstream>

#include "lcoal/error.hpp"

namespace lcoal {

namespace {

bool needs_substitution(double e) { return e < 0.0 || e != std::floor(e); }

double powz(double x, double e) {
  if (e == 0.0) return 1.0;  // 0^0 = 1
  return std::pow(x, e);
}

bool in_interval(double x, const Interval& iv) {
  const bool lo_ok = iv.lo_closed ? x >= iv.lo : x > iv.lo;
  const bool hi_ok = iv.hi_closed ? x <= iv.hi : x < iv.hi;
  return lo_ok && hi_ok;
}

void accumulate(QuadratureResult& acc, const QuadratureResult& r) {
  acc.value += r.value;
  acc.error += r.error;
  acc.evaluations += r.evaluations;
  acc.intervals += r.intervals;
}

QuadratureResult integrate_piece(const PointIntegrand& f, const DensityPiece& piece, double u,
                                 double v, const QuadratureConfig& cfg) {
  QuadratureResult acc;
  if (!(v > u)) return acc;
  const double c = piece.coefficient();
  if (c == 0.0) return acc;
  const double p = piece.x_exponent();
  const double q = piece.one_minus_x_exponent();
  const double s = std::min(std::max(0.5, u), v);

  auto direct = [&](double x) {
    const double omx = 1.0 - x;
    return c * powz(x, p) * powz(omx, q) * piece.polynomial(x) * f(x, omx);
  };

  if (s > u) {
    if (u == 0.0 && needs_substitution(p)) {
      // x = t^{1/(p+1)}: x^p dx = dt/(p+1)
      const double inv = 1.0 / (p + 1.0);
      auto g = [&](double t) {
        const double x = std::pow(t, inv);
        const double omx = 1.0 - x;
        return c * inv * powz(omx, q) * piece.polynomial(x) * f(x, omx);
      };
      accumulate(acc, integrate_interval(g, 0.0, std::pow(s, p + 1.0), cfg));
    } else {
      accumulate(acc, integrate_interval(direct, u, s, cfg));
    }
  }
  if (v > s) {
    if (v == 1.0 && needs_substitution(q)) {
      // 1-x = w^{1/(q+1)}: (1-x)^q dx = -dw/(q+1)
      const double inv = 1.0 / (q + 1.0);
      auto g = [&](double w) {
        const double omx = std::pow(w, inv);
        const double x = 1.0 - omx;
        return c * inv * powz(x, p) * piece.polynomial(x) * f(x, omx);
      };
      accumulate(acc, integrate_interval(g, 0.0, std::pow(1.0 - s, q + 1.0), cfg));
    } else {
      accumulate(acc, integrate_interval(direct, s, v, cfg));
    }
  }
  return acc;
}

std::vector<std::string> validation_errors(const std::vector<Atom>& atoms,
                                           const std::vector<DensityPiece>& pieces) {
  std::vector<std::string> errs;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.location >= 0.0 && a.location <= 1.0))
      errs.push_back("atom " + std::to_string(i) + ": location outside [0,1]");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass))
      errs.push_back("atom " + std::to_string(i) + ": mass must be > 0");
    for (std::size_t j = 0; j < i; ++j)
      if (atoms[j].location == a.location)
        errs.push_back("atom " + std::to_string(i) + ": duplicate location");
  }
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& d = pieces[i];
    const std::string tag = "density " + std::to_string(i) + ": ";
    if (!(d.lo >= 0.0 && d.hi <= 1.0 && d.lo < d.hi)) {
      errs.push_back(tag + "interval must satisfy 0 <= lo < hi <= 1");
      continue;
    }
    switch (d.kind) {
      case DensityKind::Constant:
        if (!(d.value >= 0.0) || !std::isfinite(d.value)) errs.push_back(tag + "constant must be >= 0");
        break;
      case DensityKind::Beta:
        if (!(d.a > 0.0 && d.b > 0.0)) errs.push_back(tag + "beta parameters must be > 0");
        if (!(d.weight >= 0.0)) errs.push_back(tag + "beta weight must be >= 0");
        break;
      case DensityKind::Power:
        if (!(d.scale >= 0.0)) errs.push_back(tag + "power scale must be >= 0");
        if (d.lo == 0.0 && !(d.p > -1.0)) errs.push_back(tag + "x exponent must be > -1 on a piece touching 0");
        if (d.hi == 1.0 && !(d.q > -1.0)) errs.push_back(tag + "(1-x) exponent must be > -1 on a piece touching 1");
        break;
      case DensityKind::Polynomial: {
        if (d.coeffs.empty()) errs.push_back(tag + "polynomial needs coefficients");
        double scale = 0.0;
        for (double c : d.coeffs) scale = std::max(scale, std::fabs(c));
        constexpr int grid = 4096;
        for (int j = 0; j <= grid; ++j) {
          const double x = d.lo + (d.hi - d.lo) * j / grid;
          if (d.polynomial(x) < -1e-14 * scale) {
            errs.push_back(tag + "polynomial density negative near x = " + std::to_string(x));
            break;
          }
        }
        break;
      }
    }
  }
  return errs;
}

}  // namespace

double DensityPiece::coefficient() const {
  switch (kind) {
    case DensityKind::Constant: return value;
    case DensityKind::Beta: return weight / boost::math::beta(a, b);
    case DensityKind::Power: return scale;
    case DensityKind::Polynomial: return 1.0;
  }
  return 0.0;
}

double DensityPiece::x_exponent() const {
  switch (kind) {
    case DensityKind::Beta: return a - 1.0;
    case DensityKind::Power: return p;
    default: return 0.0;
  }
}

double DensityPiece::one_minus_x_exponent() const {
  switch (kind) {
    case DensityKind::Beta: return b - 1.0;
    case DensityKind::Power: return q;
    default: return 0.0;
  }
}

double DensityPiece::polynomial(double x) const {
  if (kind != DensityKind::Polynomial) return 1.0;
  double r = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
  return r;
}

double DensityPiece::density(double x) const {
  if (x < lo || x > hi) return 0.0;
  return coefficient() * powz(x, x_exponent()) * powz(1.0 - x, one_minus_x_exponent()) * polynomial(x);
}

QuadratureConfig default_measure_quadrature() { return QuadratureConfig{}; }

LambdaMeasure::LambdaMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces)
    : atoms_(std::move(atoms)), pieces_(std::move(pieces)) {
  auto errs = validation_errors(atoms_, pieces_);
  if (!errs.empty()) {
    std::ostringstream os;
    os << "invalid measure:";
    for (const auto& e : errs) os << "\n  " << e;
    throw Error(ErrorCode::ValidationError, os.str());
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  QuadratureResult r = integrate_over([](double, double) { return 1.0; }, *this, Interval{},
                                      default_measure_quadrature());
  total_mass_ = r.value;
}

LambdaMeasure LambdaMeasure::kingman(double m) { return LambdaMeasure({{0.0, m}}, {}); }

LambdaMeasure LambdaMeasure::atom(double location, double m) { return LambdaMeasure({{location, m}}, {}); }

LambdaMeasure LambdaMeasure::lebesgue(double value) {
  DensityPiece d;
  d.kind = DensityKind::Constant;
  d.value = value;
  return LambdaMeasure({}, {d});
}

LambdaMeasure LambdaMeasure::beta(double a, double b, double weight) {
  DensityPiece d;
  d.kind = DensityKind::Beta;
  d.a = a;
  d.b = b;
  d.weight = weight;
  return LambdaMeasure({}, {d});
}

LambdaMeasure LambdaMeasure::beta_alpha(double alpha, double weight) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw Error(ErrorCode::ValidationError, "beta(2-alpha, alpha) needs alpha in (0,2)");
  return beta(2.0 - alpha, alpha, weight);
}

double LambdaMeasure::atom_mass_at(double location) const {
  for (const auto& a : atoms_)
    if (a.location == location) return a.mass;
  return 0.0;
}

bool LambdaMeasure::pairwise_only() const {
  if (!pieces_.empty()) {
    for (const auto& d : pieces_)
      if (d.coefficient() != 0.0) return false;
  }
  for (const auto& a : atoms_)
    if (a.location != 0.0) return false;
  return !atoms_.empty();
}

bool LambdaMeasure::operator==(const LambdaMeasure& o) const {
  if (atoms_.size() != o.atoms_.size() || pieces_.size() != o.pieces_.size()) return false;
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].location != o.atoms_[i].location || atoms_[i].mass != o.atoms_[i].mass) return false;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& x = pieces_[i];
    const auto& y = o.pieces_[i];
    if (x.kind != y.kind || x.lo != y.lo || x.hi != y.hi || x.value != y.value || x.a != y.a ||
        x.b != y.b || x.weight != y.weight || x.p != y.p || x.q != y.q || x.scale != y.scale ||
        x.coeffs != y.coeffs)
      return false;
  }
  return true;
}

QuadratureResult integrate_over(const PointIntegrand& f, const LambdaMeasure& measure,
                                const Interval& interval, const QuadratureConfig& cfg) {
  QuadratureResult acc;
  for (const auto& a : measure.atoms()) {
    if (!in_interval(a.location, interval)) continue;
    acc.value += a.mass * f(a.location, 1.0 - a.location);
  }
  for (const auto& piece : measure.pieces()) {
    const double u = std::max(piece.lo, interval.lo);
    const double v = std::min(piece.hi, interval.hi);
    accumulate(acc, integrate_piece(f, piece, u, v, cfg));
  }
  return acc;
}

QuadratureResult integrate(const ScalarIntegrand& f, const LambdaMeasure& measure,
                           const QuadratureConfig& cfg) {
  return integrate_over([&](double x, double) { return f(x); }, measure, Interval{}, cfg);
}

double mass(const LambdaMeasure& measure, const Interval& interval, const QuadratureConfig& cfg) {
  if (!(interval.lo >= 0.0 && interval.hi <= 1.0 && interval.lo <= interval.hi))
    throw Error(ErrorCode::InvalidArgument, "mass: interval must lie in [0,1]");
  return integrate_over([](double, double) { return 1.0; }, measure, interval, cfg).value;
}

LambdaMeasure restrict(const LambdaMeasure& measure, double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "restrict: a must lie in (0,1)");
  std::vector<Atom> atoms;
  for (const auto& at : measure.atoms())
    if (at.location <= a) atoms.push_back(at);
  std::vector<DensityPiece> pieces;
  for (auto piece : measure.pieces()) {
    if (piece.lo >= a) continue;
    piece.hi = std::min(piece.hi, a);
    pieces.push_back(piece);
  }
  return LambdaMeasure(std::move(atoms), std::move(pieces));
}

}  // namespace lcoal

namespace lcoal {

namespace {

void add_into(VectorQuadratureResult& acc, const VectorQuadratureResult& r) {
  for (std::size_t i = 0; i < r.value.size(); ++i) acc.value[i] += r.value[i];
  acc.error += r.error;
  acc.intervals += r.intervals;
}

}  // namespace

VectorQuadratureResult integrate_vector_over(const VectorPointIntegrand& f, std::size_t dim,
                                             const LambdaMeasure& measure,
                                             const QuadratureConfig& cfg) {
  VectorQuadratureResult acc;
  acc.value.assign(dim, 0.0);
  std::vector<double> buf(dim);
  for (const auto& a : measure.atoms()) {
    f(a.location, 1.0 - a.location, buf.data());
    for (std::size_t i = 0; i < dim; ++i) acc.value[i] += a.mass * buf[i];
  }
  for (const auto& piece : measure.pieces()) {
    const double c = piece.coefficient();
    if (c == 0.0) continue;
    const double p = piece.x_exponent();
    const double q = piece.one_minus_x_exponent();
    const double u = piece.lo, v = piece.hi;
    const double s = std::min(std::max(0.5, u), v);
    auto scaled = [&](double x, double omx, double w, double* out) {
      f(x, omx, out);
      for (std::size_t i = 0; i < dim; ++i) out[i] *= w;
    };
    if (s > u) {
      if (u == 0.0 && needs_substitution(p)) {
        const double inv = 1.0 / (p + 1.0);
        add_into(acc, integrate_vector(
                          [&](double t, double* out) {
                            const double x = std::pow(t, inv);
                            scaled(x, 1.0 - x, c * inv * powz(1.0 - x, q) * piece.polynomial(x), out);
                          },
                          dim, 0.0, std::pow(s, p + 1.0), cfg));
      } else {
        add_into(acc, integrate_vector(
                          [&](double x, double* out) {
                            scaled(x, 1.0 - x, c * powz(x, p) * powz(1.0 - x, q) * piece.polynomial(x), out);
                          },
                          dim, u, s, cfg));
      }
    }
    if (v > s) {
      if (v == 1.0 && needs_substitution(q)) {
        const double inv = 1.0 / (q + 1.0);
        add_into(acc, integrate_vector(
                          [&](double w, double* out) {
                            const double omx = std::pow(w, inv);
                            const double x = 1.0 - omx;
                            scaled(x, omx, c * inv * powz(x, p) * piece.polynomial(x), out);
                          },
                          dim, 0.0, std::pow(1.0 - s, q + 1.0), cfg));
      } else {
        add_into(acc, integrate_vector(
                          [&](double x, double* out) {
                            scaled(x, 1.0 - x, c * powz(x, p) * powz(1.0 - x, q) * piece.polynomial(x), out);
                          },
                          dim, s, v, cfg));
      }
    }
  }
  return acc;
}

}  // namespace lcoal
