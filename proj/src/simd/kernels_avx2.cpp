#include "abw/simd.hpp"

#include <immintrin.h>

// AVX2 + FMA variants.  This TU is the only one built with -mavx2 -mfma;
// dispatch.cpp verifies cpu support before exposing these entry points.
//
// Complex data is kept in split re/im planes, so a 256-bit lane holds four
// independent complex values and the arithmetic never needs shuffles.

namespace abw::simd {
namespace {

struct CplxV {
  __m256d re, im;
};

inline CplxV cmul(CplxV a, CplxV b) {
  // (a.re*b.re - a.im*b.im, a.re*b.im + a.im*b.re) with FMA contraction
  return {_mm256_fmsub_pd(a.re, b.re, _mm256_mul_pd(a.im, b.im)),
          _mm256_fmadd_pd(a.re, b.im, _mm256_mul_pd(a.im, b.re))};
}

void cacc_ramp_avx2(double* rre, double* rim, size_t n,
                    double cre, double cim, double ure, double uim) {
  // c * u^j vectorized as (c, cu, cu^2, cu^3) advanced by u^4 per iteration.
  const double u2re = ure * ure - uim * uim, u2im = 2.0 * ure * uim;
  const double u3re = u2re * ure - u2im * uim, u3im = u2re * uim + u2im * ure;
  const double u4re = u2re * u2re - u2im * u2im, u4im = 2.0 * u2re * u2im;
  const double c1re = cre * ure - cim * uim, c1im = cre * uim + cim * ure;
  const double c2re = cre * u2re - cim * u2im, c2im = cre * u2im + cim * u2re;
  const double c3re = cre * u3re - cim * u3im, c3im = cre * u3im + cim * u3re;

  CplxV c{_mm256_setr_pd(cre, c1re, c2re, c3re),
          _mm256_setr_pd(cim, c1im, c2im, c3im)};
  const CplxV step{_mm256_set1_pd(u4re), _mm256_set1_pd(u4im)};

  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(rre + j, _mm256_add_pd(_mm256_loadu_pd(rre + j), c.re));
    _mm256_storeu_pd(rim + j, _mm256_add_pd(_mm256_loadu_pd(rim + j), c.im));
    c = cmul(c, step);
  }
  if (j < n) {
    alignas(32) double tre[4], tim[4];
    _mm256_store_pd(tre, c.re);
    _mm256_store_pd(tim, c.im);
    for (size_t k = 0; j < n; ++j, ++k) {
      rre[j] += tre[k];
      rim[j] += tim[k];
    }
  }
}

void cdot_ramp_avx2(const double* rre, const double* rim, size_t n,
                    double ure, double uim, double* out_re, double* out_im) {
  const double u2re = ure * ure - uim * uim, u2im = 2.0 * ure * uim;
  const double u3re = u2re * ure - u2im * uim, u3im = u2re * uim + u2im * ure;
  const double u4re = u2re * u2re - u2im * u2im, u4im = 2.0 * u2re * u2im;

  CplxV p{_mm256_setr_pd(1.0, ure, u2re, u3re),
          _mm256_setr_pd(0.0, uim, u2im, u3im)};
  const CplxV step{_mm256_set1_pd(u4re), _mm256_set1_pd(u4im)};
  __m256d acc_re = _mm256_setzero_pd(), acc_im = _mm256_setzero_pd();

  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const CplxV x{_mm256_loadu_pd(rre + j), _mm256_loadu_pd(rim + j)};
    const CplxV t = cmul(x, p);
    acc_re = _mm256_add_pd(acc_re, t.re);
    acc_im = _mm256_add_pd(acc_im, t.im);
    p = cmul(p, step);
  }
  alignas(32) double lre[4], lim[4], pre[4], pim[4];
  _mm256_store_pd(lre, acc_re);
  _mm256_store_pd(lim, acc_im);
  _mm256_store_pd(pre, p.re);
  _mm256_store_pd(pim, p.im);
  double are = ((lre[0] + lre[1]) + (lre[2] + lre[3]));
  double aim = ((lim[0] + lim[1]) + (lim[2] + lim[3]));
  for (size_t k = 0; j < n; ++j, ++k) {
    are += rre[j] * pre[k] - rim[j] * pim[k];
    aim += rre[j] * pim[k] + rim[j] * pre[k];
  }
  *out_re = are;
  *out_im = aim;
}

void cpow_inplace_avx2(double* re, double* im, size_t n, uint64_t p) {
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    CplxV b{_mm256_loadu_pd(re + j), _mm256_loadu_pd(im + j)};
    CplxV a{_mm256_set1_pd(1.0), _mm256_setzero_pd()};
    uint64_t e = p;
    while (e) {
      if (e & 1) a = cmul(a, b);
      e >>= 1;
      if (e) b = cmul(b, b);
    }
    _mm256_storeu_pd(re + j, a.re);
    _mm256_storeu_pd(im + j, a.im);
  }
  for (; j < n; ++j) {
    double bre = re[j], bim = im[j], are = 1.0, aim = 0.0;
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

void cmul_inplace_avx2(double* re, double* im,
                       const double* vre, const double* vim, size_t n) {
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const CplxV a{_mm256_loadu_pd(re + j), _mm256_loadu_pd(im + j)};
    const CplxV b{_mm256_loadu_pd(vre + j), _mm256_loadu_pd(vim + j)};
    const CplxV t = cmul(a, b);
    _mm256_storeu_pd(re + j, t.re);
    _mm256_storeu_pd(im + j, t.im);
  }
  for (; j < n; ++j) {
    const double t = re[j] * vre[j] - im[j] * vim[j];
    im[j] = re[j] * vim[j] + im[j] * vre[j];
    re[j] = t;
  }
}

void cdiv_inplace_avx2(double* re, double* im,
                       const double* vre, const double* vim, size_t n) {
  size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d bre = _mm256_loadu_pd(vre + j);
    const __m256d bim = _mm256_loadu_pd(vim + j);
    const __m256d are = _mm256_loadu_pd(re + j);
    const __m256d aim = _mm256_loadu_pd(im + j);
    const __m256d d = _mm256_fmadd_pd(bre, bre, _mm256_mul_pd(bim, bim));
    const __m256d tre = _mm256_fmadd_pd(are, bre, _mm256_mul_pd(aim, bim));
    const __m256d tim = _mm256_fmsub_pd(aim, bre, _mm256_mul_pd(are, bim));
    _mm256_storeu_pd(re + j, _mm256_div_pd(tre, d));
    _mm256_storeu_pd(im + j, _mm256_div_pd(tim, d));
  }
  for (; j < n; ++j) {
    const double d = vre[j] * vre[j] + vim[j] * vim[j];
    const double t = (re[j] * vre[j] + im[j] * vim[j]) / d;
    im[j] = (im[j] * vre[j] - re[j] * vim[j]) / d;
    re[j] = t;
  }
}

void axpy_avx2(double* y, const double* x, size_t n, double a) {
  const __m256d va = _mm256_set1_pd(a);
  size_t j = 0;
  for (; j + 4 <= n; j += 4)
    _mm256_storeu_pd(y + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + j),
                                            _mm256_loadu_pd(y + j)));
  for (; j < n; ++j) y[j] += a * x[j];
}

constexpr size_t kSumBlock = 4096;

double sum_block(const double* x, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t j = 0;
  for (; j + 4 <= n; j += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + j));
  alignas(32) double l[4];
  _mm256_store_pd(l, acc);
  double tail = 0;
  for (; j < n; ++j) tail += x[j];
  return ((l[0] + l[1]) + (l[2] + l[3])) + tail;
}

double sum_pairwise(const double* x, size_t n) {
  if (n <= kSumBlock) return sum_block(x, n);
  size_t half = kSumBlock;
  while (half * 2 < n) half *= 2;
  return sum_pairwise(x, half) + sum_pairwise(x + half, n - half);
}

double sum_avx2(const double* x, size_t n) { return sum_pairwise(x, n); }

}  // namespace

namespace detail {
extern const Kernels avx2_kernels;
const Kernels avx2_kernels = {
    cacc_ramp_avx2, cdot_ramp_avx2, cpow_inplace_avx2,
    cmul_inplace_avx2, cdiv_inplace_avx2, axpy_avx2, sum_avx2,
    "avx2"};
}  // namespace detail

}  // namespace abw::simd
