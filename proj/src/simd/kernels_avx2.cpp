// Compile with: -mavx2 -mfma
#include <immintrin.h>

#include <cmath>

#include "lcoal/simd/kernels.hpp"

namespace lcoal::simd::avx2 {

namespace {
double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double max_abs_diff(const double* x, const double* y, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, d));
  }
  alignas(32) double buf[4];
  _mm256_store_pd(buf, m);
  double r = std::fmax(std::fmax(buf[0], buf[1]), std::fmax(buf[2], buf[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i] - y[i]));
  return r;
}

double sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void pascal_down(const double* upper, double* lower, std::size_t b) {
  const double bp1 = static_cast<double>(b + 1);
  const double inv = 1.0 / bp1;
  const __m256d vinv = _mm256_set1_pd(inv);
  const __m256d vbp1 = _mm256_set1_pd(bp1);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d kv = _mm256_setr_pd(2.0, 3.0, 4.0, 5.0);
  std::size_t k = 2;
  for (; k + 4 <= b + 1; k += 4) {
    __m256d u0 = _mm256_loadu_pd(upper + k);
    __m256d u1 = _mm256_loadu_pd(upper + k + 1);
    __m256d t = _mm256_mul_pd(u0, _mm256_sub_pd(vbp1, kv));
    t = _mm256_fmadd_pd(u1, _mm256_add_pd(kv, one), t);
    _mm256_storeu_pd(lower + k, _mm256_mul_pd(t, vinv));
    kv = _mm256_add_pd(kv, four);
  }
  for (; k <= b; ++k) {
    const double kd = static_cast<double>(k);
    lower[k] = std::fma(upper[k + 1], kd + 1.0, upper[k] * (bp1 - kd)) * inv;
  }
}

}  // namespace lcoal::simd::avx2
