#include <atomic>

#include "lcoal/error.hpp"
#include "lcoal/simd/kernels.hpp"

namespace lcoal::simd {

namespace {

Isa detect() {
#if defined(LCOAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
#if defined(LCOAL_HAVE_NEON)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(LCOAL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  if (isa == Isa::Avx2) {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }
#endif
#if defined(LCOAL_HAVE_NEON)
  if (isa == Isa::Neon) return true;
#endif
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa))
    throw Error(ErrorCode::InvalidArgument, "instruction set not available: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

#if defined(LCOAL_HAVE_AVX2)
#define LCOAL_AVX2_CASE(call) \
  case Isa::Avx2: return avx2::call;
#else
#define LCOAL_AVX2_CASE(call)
#endif
#if defined(LCOAL_HAVE_NEON)
#define LCOAL_NEON_CASE(call) \
  case Isa::Neon: return neon::call;
#else
#define LCOAL_NEON_CASE(call)
#endif

#define LCOAL_DISPATCH(call)        \
  switch (active_isa()) {           \
    LCOAL_AVX2_CASE(call)           \
    LCOAL_NEON_CASE(call)           \
    default: return scalar::call;   \
  }

void axpy(double a, const double* x, double* y, std::size_t n) { LCOAL_DISPATCH(axpy(a, x, y, n)) }
double max_abs_diff(const double* x, const double* y, std::size_t n) { LCOAL_DISPATCH(max_abs_diff(x, y, n)) }
double sum(const double* x, std::size_t n) { LCOAL_DISPATCH(sum(x, n)) }
double dot(const double* x, const double* y, std::size_t n) { LCOAL_DISPATCH(dot(x, y, n)) }
void pascal_down(const double* upper, double* lower, std::size_t b) { LCOAL_DISPATCH(pascal_down(upper, lower, b)) }

}  // namespace lcoal::simd
