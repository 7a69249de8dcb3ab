#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lcoal {

enum class SubdivisionRule {
  Bisection,  // start from the whole interval
  Graded,     // pre-split geometrically toward the left endpoint when a > 0 and b/a is large
};

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 100000;
  SubdivisionRule rule = SubdivisionRule::Graded;

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  int intervals = 0;
};

using ScalarIntegrand = std::function<double(double)>;
// Writes dim values for node x into out.
using VectorIntegrand = std::function<void(double x, double* out)>;

struct VectorQuadratureResult {
  std::vector<double> value;
  double error = 0.0;  // max-norm error bound summed over intervals
  int intervals = 0;
};

// Adaptive Gauss-Kronrod (10/21 point) on [a, b]. Throws TOLERANCE_NOT_MET.
QuadratureResult integrate_interval(const ScalarIntegrand& f, double a, double b,
                                    const QuadratureConfig& cfg);

// Same scheme for a vector-valued integrand; the error norm is the max over components
// and the target is max(abs_tol, rel_tol * max_k |I_k|).
VectorQuadratureResult integrate_vector(const VectorIntegrand& f, std::size_t dim, double a,
                                        double b, const QuadratureConfig& cfg);

}  // namespace lcoal
