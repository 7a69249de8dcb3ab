#pragma once

#include <cstddef>
#include <string_view>

// Dense numeric kernels with a scalar reference and vector variants.
// The active variant is picked once at startup from CPU features and can be
// pinned with set_isa() (tests compare every variant against the scalar one).

namespace lcoal::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
void set_isa(Isa isa);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
// lower[k] = (upper[k] (b+1-k) + upper[k+1] (k+1)) / (b+1) for 2 <= k <= b.
// upper has b+2 entries (index b+1 valid), lower has b+1 entries.
void pascal_down(const double* upper, double* lower, std::size_t b);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void pascal_down(const double* upper, double* lower, std::size_t b);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void pascal_down(const double* upper, double* lower, std::size_t b);
}  // namespace avx2

namespace neon {
void axpy(double a, const double* x, double* y, std::size_t n);
double max_abs_diff(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
void pascal_down(const double* upper, double* lower, std::size_t b);
}  // namespace neon

}  // namespace lcoal::simd
