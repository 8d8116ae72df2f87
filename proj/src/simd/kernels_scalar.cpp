#include "abw/simd.hpp"

// Reference kernels.  Straight loops, no intrinsics; these define the
// semantics the vector variants are tested against.

namespace abw::simd {
namespace {

void cacc_ramp_scalar(double* rre, double* rim, size_t n,
                      double cre, double cim, double ure, double uim) {
  for (size_t j = 0; j < n; ++j) {
    rre[j] += cre;
    rim[j] += cim;
    const double nre = cre * ure - cim * uim;
    const double nim = cre * uim + cim * ure;
    cre = nre;
    cim = nim;
  }
}

void cdot_ramp_scalar(const double* rre, const double* rim, size_t n,
                      double ure, double uim, double* out_re, double* out_im) {
  double are = 0.0, aim = 0.0;   // accumulator
  double pre = 1.0, pim = 0.0;   // u^j
  for (size_t j = 0; j < n; ++j) {
    are += rre[j] * pre - rim[j] * pim;
    aim += rre[j] * pim + rim[j] * pre;
    const double nre = pre * ure - pim * uim;
    const double nim = pre * uim + pim * ure;
    pre = nre;
    pim = nim;
  }
  *out_re = are;
  *out_im = aim;
}

void cpow_inplace_scalar(double* re, double* im, size_t n, uint64_t p) {
  for (size_t j = 0; j < n; ++j) {
    double bre = re[j], bim = im[j];
    double are = 1.0, aim = 0.0;
    uint64_t e = p;
    while (e) {
      if (e & 1) {
        const double t = are * bre - aim * bim;
        aim = are * bim + aim * bre;
        are = t;
      }
      e >>= 1;
      if (e) {
        const double t = bre * bre - bim * bim;
        bim = 2.0 * bre * bim;
        bre = t;
      }
    }
    re[j] = are;
    im[j] = aim;
  }
}

void cmul_inplace_scalar(double* re, double* im,
                         const double* vre, const double* vim, size_t n) {
  for (size_t j = 0; j < n; ++j) {
    const double t = re[j] * vre[j] - im[j] * vim[j];
    im[j] = re[j] * vim[j] + im[j] * vre[j];
    re[j] = t;
  }
}

void cdiv_inplace_scalar(double* re, double* im,
                         const double* vre, const double* vim, size_t n) {
  for (size_t j = 0; j < n; ++j) {
    const double d = vre[j] * vre[j] + vim[j] * vim[j];
    const double t = (re[j] * vre[j] + im[j] * vim[j]) / d;
    im[j] = (im[j] * vre[j] - re[j] * vim[j]) / d;
    re[j] = t;
  }
}

void axpy_scalar(double* y, const double* x, size_t n, double a) {
  for (size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

constexpr size_t kSumBlock = 4096;

double sum_block(const double* x, size_t n) {
  // Four independent accumulators within a block, combined in lane order.
  // The AVX2 variant uses the same split so results track closely.
  double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    a0 += x[j];
    a1 += x[j + 1];
    a2 += x[j + 2];
    a3 += x[j + 3];
  }
  double tail = 0;
  for (; j < n; ++j) tail += x[j];
  return ((a0 + a1) + (a2 + a3)) + tail;
}

double sum_pairwise(const double* x, size_t n) {
  if (n <= kSumBlock) return sum_block(x, n);
  // Split at the largest block-multiple power-of-two below n so the combine
  // tree is a function of n alone, independent of call context.
  size_t half = kSumBlock;
  while (half * 2 < n) half *= 2;
  return sum_pairwise(x, half) + sum_pairwise(x + half, n - half);
}

double sum_scalar(const double* x, size_t n) { return sum_pairwise(x, n); }

}  // namespace

namespace detail {
extern const Kernels scalar_kernels;
const Kernels scalar_kernels = {
    cacc_ramp_scalar, cdot_ramp_scalar, cpow_inplace_scalar,
    cmul_inplace_scalar, cdiv_inplace_scalar, axpy_scalar, sum_scalar,
    "scalar"};
}  // namespace detail

}  // namespace abw::simd
