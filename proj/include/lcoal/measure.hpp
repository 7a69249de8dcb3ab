#pragma once

#include <functional>
#include <vector>

#include "lcoal/quadrature.hpp"

namespace lcoal {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

enum class DensityKind { Constant, Beta, Power, Polynomial };

// Density on [lo, hi]. Every kind reduces to c x^p (1-x)^q P(x).
struct DensityPiece {
  DensityKind kind = DensityKind::Constant;
  double lo = 0.0;
  double hi = 1.0;
  double value = 1.0;             // Constant
  double a = 1.0, b = 1.0;        // Beta(a, b), normalized, times weight
  double weight = 1.0;
  double p = 0.0, q = 0.0;        // Power: scale x^p (1-x)^q
  double scale = 1.0;
  std::vector<double> coeffs;     // Polynomial: sum coeffs[i] x^i

  double coefficient() const;
  double x_exponent() const;
  double one_minus_x_exponent() const;
  double polynomial(double x) const;
  double density(double x) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_closed = true;
  bool hi_closed = true;
};

// Integrand receiving x and 1-x separately so that callers can keep full
// precision of 1-x near the right endpoint.
using PointIntegrand = std::function<double(double x, double one_minus_x)>;

class LambdaMeasure {
 public:
  LambdaMeasure() = default;  // zero measure
  LambdaMeasure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces);

  static LambdaMeasure kingman(double mass = 1.0);
  static LambdaMeasure atom(double location, double mass = 1.0);
  static LambdaMeasure lebesgue(double value = 1.0);
  static LambdaMeasure beta(double a, double b, double weight = 1.0);
  // Beta(2 - alpha, alpha)
  static LambdaMeasure beta_alpha(double alpha, double weight = 1.0);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& pieces() const { return pieces_; }
  double total_mass() const { return total_mass_; }
  bool is_zero() const { return total_mass_ <= 0.0; }
  double atom_mass_at(double location) const;
  bool has_atom_at_zero() const { return atom_mass_at(0.0) > 0.0; }
  bool has_atom_at_one() const { return atom_mass_at(1.0) > 0.0; }
  // Only an atom at 0: every merger is binary.
  bool pairwise_only() const;

  bool operator==(const LambdaMeasure& other) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
  double total_mass_ = 0.0;
};

QuadratureConfig default_measure_quadrature();

// Integral of f over the part of the measure inside the interval.
QuadratureResult integrate_over(const PointIntegrand& f, const LambdaMeasure& measure,
                                const Interval& interval, const QuadratureConfig& cfg);

QuadratureResult integrate(const ScalarIntegrand& f, const LambdaMeasure& measure,
                           const QuadratureConfig& cfg = default_measure_quadrature());

double mass(const LambdaMeasure& measure, const Interval& interval,
            const QuadratureConfig& cfg = default_measure_quadrature());

LambdaMeasure restrict(const LambdaMeasure& measure, double a);

}  // namespace lcoal

namespace lcoal {

// Vector-valued version of integrate_over on [0,1]: out has dim entries and is
// overwritten with the integral of f(x, 1-x, .) against the measure.
using VectorPointIntegrand = std::function<void(double x, double one_minus_x, double* out)>;
VectorQuadratureResult integrate_vector_over(const VectorPointIntegrand& f, std::size_t dim,
                                             const LambdaMeasure& measure,
                                             const QuadratureConfig& cfg);

}  // namespace lcoal
