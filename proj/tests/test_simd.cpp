#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "abw/simd.hpp"
#include "abw/types.hpp"

using namespace abw;

namespace {

// Relative agreement between kernel variants; they may round differently but
// must match the scalar reference to this factor of the data scale.
constexpr double kEquivTol = 1e-11;

struct Arrays {
  std::vector<double> re, im;
};

Arrays random_arrays(Rng& rng, size_t n, double scale = 1.0) {
  Arrays a;
  a.re.resize(n);
  a.im.resize(n);
  for (size_t i = 0; i < n; ++i) {
    a.re[i] = scale * rng.uniform(-1.0, 1.0);
    a.im[i] = scale * rng.uniform(-1.0, 1.0);
  }
  return a;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("simd: dispatch reports a kernel set") {
  const auto& k = simd::get();
  CHECK(k.name != nullptr);
  const auto& s = simd::get(true);
  CHECK(std::string(s.name) == "scalar");
  if (simd::cpu_has_avx2()) CHECK(std::string(simd::selected_name()) == "avx2");
}

TEST_CASE("simd: scalar kernels against std::complex reference") {
  Rng rng(7101);
  const auto& k = simd::get(true);
  for (size_t n : {size_t(1), size_t(5), size_t(64), size_t(1003)}) {
    auto a = random_arrays(rng, n);
    const cplx c(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const double ang = rng.uniform(0, 6.28);
    const cplx u(std::cos(ang), std::sin(ang));

    // cacc_ramp
    auto r = a;
    k.cacc_ramp(r.re.data(), r.im.data(), n, c.real(), c.imag(), u.real(), u.imag());
    cplx p = c;
    for (size_t j = 0; j < n; ++j) {
      const cplx want = cplx(a.re[j], a.im[j]) + p;
      CHECK(std::abs(want - cplx(r.re[j], r.im[j])) < 1e-12 * (1.0 + std::abs(want)));
      p *= u;
    }

    // cdot_ramp
    double dre = 0, dim = 0;
    k.cdot_ramp(a.re.data(), a.im.data(), n, u.real(), u.imag(), &dre, &dim);
    cplx acc = 0, q = 1;
    for (size_t j = 0; j < n; ++j) {
      acc += cplx(a.re[j], a.im[j]) * q;
      q *= u;
    }
    CHECK(std::abs(acc - cplx(dre, dim)) < 1e-11 * (1.0 + std::abs(acc)));

    // cpow
    auto w = a;
    k.cpow_inplace(w.re.data(), w.im.data(), n, 7);
    for (size_t j = 0; j < n; ++j) {
      const cplx want = std::pow(cplx(a.re[j], a.im[j]), 7);
      CHECK(std::abs(want - cplx(w.re[j], w.im[j])) < 1e-12 * (1.0 + std::abs(want)));
    }

    // cmul / cdiv round trip
    auto b = random_arrays(rng, n);
    for (size_t j = 0; j < n; ++j)
      if (std::abs(cplx(b.re[j], b.im[j])) < 0.1) b.re[j] += 0.5;
    auto m = a;
    k.cmul_inplace(m.re.data(), m.im.data(), b.re.data(), b.im.data(), n);
    k.cdiv_inplace(m.re.data(), m.im.data(), b.re.data(), b.im.data(), n);
    CHECK(max_abs_diff(m.re, a.re) < 1e-12);
    CHECK(max_abs_diff(m.im, a.im) < 1e-12);

    // axpy, sum
    std::vector<double> y(n, 0.25), x(n);
    for (size_t j = 0; j < n; ++j) x[j] = a.re[j];
    k.axpy(y.data(), x.data(), n, 3.0);
    for (size_t j = 0; j < n; ++j) CHECK(y[j] == doctest::Approx(0.25 + 3.0 * x[j]).epsilon(1e-14));
    double s = k.sum(x.data(), n);
    double ref = 0;
    for (double v : x) ref += v;
    CHECK(s == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("simd: cpow exponent edge cases") {
  const auto& k = simd::get();
  std::vector<double> re{0.3, -1.2, 0.0}, im{0.4, 0.1, 0.0};
  auto re0 = re, im0 = im;
  k.cpow_inplace(re.data(), im.data(), re.size(), 0);
  for (size_t j = 0; j < re.size(); ++j) {
    CHECK(re[j] == 1.0);
    CHECK(im[j] == 0.0);
  }
  re = re0; im = im0;
  k.cpow_inplace(re.data(), im.data(), re.size(), 1);
  CHECK(max_abs_diff(re, re0) == 0.0);
  CHECK(max_abs_diff(im, im0) == 0.0);
}

TEST_CASE("simd: vector variant agrees with scalar reference") {
  if (!simd::cpu_has_avx2()) return;  // nothing to compare on this host
  const auto& v = simd::get();
  const auto& s = simd::get(true);
  REQUIRE(std::string(v.name) != std::string(s.name));

  Rng rng(419);
  for (size_t n : {size_t(3), size_t(4), size_t(17), size_t(256), size_t(4097), size_t(20000)}) {
    auto a = random_arrays(rng, n);
    const double ang = rng.uniform(0, 6.28);
    const double ure = std::cos(ang), uim = std::sin(ang);
    const double cre = rng.uniform(-2, 2), cim = rng.uniform(-2, 2);

    auto r1 = a, r2 = a;
    s.cacc_ramp(r1.re.data(), r1.im.data(), n, cre, cim, ure, uim);
    v.cacc_ramp(r2.re.data(), r2.im.data(), n, cre, cim, ure, uim);
    CHECK(max_abs_diff(r1.re, r2.re) < kEquivTol * double(n));
    CHECK(max_abs_diff(r1.im, r2.im) < kEquivTol * double(n));

    double s_re, s_im, v_re, v_im;
    s.cdot_ramp(a.re.data(), a.im.data(), n, ure, uim, &s_re, &s_im);
    v.cdot_ramp(a.re.data(), a.im.data(), n, ure, uim, &v_re, &v_im);
    const double scale = std::hypot(s_re, s_im) + double(n);
    CHECK(std::abs(s_re - v_re) < kEquivTol * scale);
    CHECK(std::abs(s_im - v_im) < kEquivTol * scale);

    auto p1 = a, p2 = a;
    s.cpow_inplace(p1.re.data(), p1.im.data(), n, 13);
    v.cpow_inplace(p2.re.data(), p2.im.data(), n, 13);
    CHECK(max_abs_diff(p1.re, p2.re) < kEquivTol * 10);
    CHECK(max_abs_diff(p1.im, p2.im) < kEquivTol * 10);

    auto b = random_arrays(rng, n);
    for (size_t j = 0; j < n; ++j)
      if (std::abs(cplx(b.re[j], b.im[j])) < 0.1) b.re[j] += 0.5;
    auto m1 = a, m2 = a;
    s.cmul_inplace(m1.re.data(), m1.im.data(), b.re.data(), b.im.data(), n);
    v.cmul_inplace(m2.re.data(), m2.im.data(), b.re.data(), b.im.data(), n);
    CHECK(max_abs_diff(m1.re, m2.re) < kEquivTol);
    CHECK(max_abs_diff(m1.im, m2.im) < kEquivTol);
    s.cdiv_inplace(m1.re.data(), m1.im.data(), b.re.data(), b.im.data(), n);
    v.cdiv_inplace(m2.re.data(), m2.im.data(), b.re.data(), b.im.data(), n);
    CHECK(max_abs_diff(m1.re, m2.re) < kEquivTol);
    CHECK(max_abs_diff(m1.im, m2.im) < kEquivTol);

    std::vector<double> y1(n, 0.5), y2(n, 0.5);
    s.axpy(y1.data(), a.re.data(), n, -1.7);
    v.axpy(y2.data(), a.re.data(), n, -1.7);
    CHECK(max_abs_diff(y1, y2) < kEquivTol);

    CHECK(std::abs(s.sum(a.re.data(), n) - v.sum(a.re.data(), n)) <
          kEquivTol * double(n));
  }
}

TEST_CASE("simd: sum reduction is deterministic across call repetition") {
  Rng rng(99);
  std::vector<double> x(12345);
  for (auto& v : x) v = rng.uniform(-1, 1);
  const auto& k = simd::get();
  const double first = k.sum(x.data(), x.size());
  for (int i = 0; i < 5; ++i) CHECK(k.sum(x.data(), x.size()) == first);
}
