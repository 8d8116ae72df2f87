#include "abw/simd.hpp"

namespace abw::simd {

namespace detail {
extern const Kernels scalar_kernels;
#if ABW_HAVE_AVX2_TU
extern const Kernels avx2_kernels;
#endif
}  // namespace detail

bool cpu_has_avx2() {
#if ABW_HAVE_AVX2_TU
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {
bool g_pin_scalar = false;
}

void pin_scalar(bool on) { g_pin_scalar = on; }

const Kernels& get(bool force_scalar) {
#if ABW_HAVE_AVX2_TU
  static const bool avx2 = cpu_has_avx2();
  if (!force_scalar && !g_pin_scalar && avx2) return detail::avx2_kernels;
#endif
  (void)force_scalar;
  return detail::scalar_kernels;
}

const char* selected_name(bool force_scalar) { return get(force_scalar).name; }

}  // namespace abw::simd
