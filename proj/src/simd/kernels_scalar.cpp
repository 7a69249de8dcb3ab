#include <cmath>

#include "lcoal/simd/kernels.hpp"

namespace lcoal::simd::scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i] - y[i]));
  return m;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void pascal_down(const double* upper, double* lower, std::size_t b) {
  const double inv = 1.0 / static_cast<double>(b + 1);
  for (std::size_t k = 2; k <= b; ++k) {
    lower[k] = (upper[k] * static_cast<double>(b + 1 - k) +
                upper[k + 1] * static_cast<double>(k + 1)) * inv;
  }
}

}  // namespace lcoal::simd::scalar
