#pragma once

#include <cstddef>
#include <cstdint>

namespace abw::simd {

// Data-parallel inner loops used by the quadrature, field-synthesis and
// convolution drivers.  Complex arrays are split into separate re/im planes.
// Every kernel has a scalar reference implementation; on x86 an AVX2 variant
// is compiled into its own TU and selected at runtime when the cpu supports
// it.  Variants may round differently (fused ops, different accumulation
// order) but must agree with the scalar reference to tight tolerance; the
// equivalence suite enforces that.
struct Kernels {
  // row[j] += c * u^j for j in [0, n)
  void (*cacc_ramp)(double* rre, double* rim, size_t n,
                    double cre, double cim, double ure, double uim);
  // out = sum_j row[j] * u^j
  void (*cdot_ramp)(const double* rre, const double* rim, size_t n,
                    double ure, double uim, double* out_re, double* out_im);
  // w[j] <- w[j]^p elementwise (binary exponentiation; p == 0 gives 1)
  void (*cpow_inplace)(double* re, double* im, size_t n, uint64_t p);
  // w[j] <- w[j] * v[j] elementwise
  void (*cmul_inplace)(double* re, double* im,
                       const double* vre, const double* vim, size_t n);
  // w[j] <- w[j] / v[j] elementwise
  void (*cdiv_inplace)(double* re, double* im,
                       const double* vre, const double* vim, size_t n);
  // y[j] += a * x[j]
  void (*axpy)(double* y, const double* x, size_t n, double a);
  // blocked pairwise sum (fixed block size, deterministic combine order)
  double (*sum)(const double* x, size_t n);
  const char* name;
};

// Selected kernel table for this process.  force_scalar bypasses the cpu
// probe so callers (tests, --force-scalar) can pin the reference path.
const Kernels& get(bool force_scalar = false);

// Process-wide override: after pin_scalar(true) every get() in this process
// returns the scalar table, so a CLI flag can pin the reference path through
// library internals that call get() themselves.
void pin_scalar(bool on);

bool cpu_has_avx2();
const char* selected_name(bool force_scalar = false);

}  // namespace abw::simd
