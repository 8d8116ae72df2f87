#include <doctest.h>

#include "abw/lattice.hpp"

#include <cmath>
#include <vector>

using namespace abw;

namespace {

// Binomial oracle: p_n(v) of the +-1 coin walk from a long double Pascal
// triangle, exact to ~1e-18 relative for n <= 400.
std::vector<long double> pascal_row(int n) {
  std::vector<long double> row{1.0L};
  for (int i = 1; i <= n; ++i) {
    std::vector<long double> next(i + 1, 0.0L);
    for (int j = 0; j < i; ++j) {
      next[j] += 0.5L * row[j];
      next[j + 1] += 0.5L * row[j];
    }
    row = std::move(next);
  }
  return row;  // row[j] = C(n,j) / 2^n
}

double coin_pn(int n, int64_t v) {
  if ((v + n) % 2 != 0 || std::abs(v) > n) return 0.0;
  return static_cast<double>(pascal_row(n)[(n + v) / 2]);
}

WalkSpec simple_z1() {
  WalkSpec s;
  s.flavor = Flavor::lattice;
  s.rank = 1;
  Vec p(1), m(1);
  p << 1;
  m << -1;
  s.steps = {{p, 0.5}, {m, 0.5}};
  return s;
}

WalkSpec simple_z2() {
  WalkSpec s;
  s.flavor = Flavor::lattice;
  s.rank = 2;
  auto v = [](double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
  };
  s.steps = {{v(1, 0), 0.25}, {v(-1, 0), 0.25}, {v(0, 1), 0.25}, {v(0, -1), 0.25}};
  return s;
}

IKey key1(int32_t a) { return make_key({a}); }
IKey key2(int32_t a, int32_t b) { return make_key({a, b}); }

}  // namespace

TEST_CASE("exact convolution matches the binomial oracle") {
  const Kernel k = build_kernel(simple_z1());

  const DensityTable t1 = exact_pn_convolution(k, 1);
  CHECK(t1.at(key1(1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t1.at(key1(-1)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t1.at(key1(0)) == 0.0);

  const DensityTable t3 = exact_pn_convolution(k, 3);
  CHECK(t3.at(key1(1)) == doctest::Approx(0.375).epsilon(1e-15));
  const DensityTable t4 = exact_pn_convolution(k, 4);
  CHECK(t4.at(key1(0)) == doctest::Approx(0.375).epsilon(1e-15));

  const DensityTable t = exact_pn_convolution(k, 100);
  CHECK(t.mass() == doctest::Approx(1.0).epsilon(1e-12));
  for (int64_t v = -100; v <= 100; ++v) {
    const double want = coin_pn(100, v);
    const double got = t.at(key1(static_cast<int32_t>(v)));
    if (want == 0.0)
      CHECK(got == 0.0);
    else
      CHECK(got == doctest::Approx(want).epsilon(1e-13));
  }
  CHECK(t.at(key1(0)) == doctest::Approx(0.07958923738717877).epsilon(1e-13));

  // residue class: v reachable iff v + n even, and only inside |v| <= n
  int nonzero = 0;
  t.for_each([&](const IKey& v, double p) {
    if (p > 0) {
      ++nonzero;
      CHECK((v[0] + 100) % 2 == 0);
      CHECK(std::abs(v[0]) <= 100);
      CHECK(support_residue_ok(k, v, 100));
    }
  });
  CHECK(nonzero == 101);
}

TEST_CASE("convolution table symmetries and guards") {
  const Kernel k = build_kernel(simple_z2());
  const DensityTable t = exact_pn_convolution(k, 30);
  CHECK(t.mass() == doctest::Approx(1.0).epsilon(1e-12));

  t.for_each([&](const IKey& v, double p) {
    CHECK(p >= 0.0);
    // symmetry group of the step set: axis flips and the swap
    CHECK(t.at(key2(-v[0], v[1])) == doctest::Approx(p).epsilon(1e-13));
    CHECK(t.at(key2(v[1], v[0])) == doctest::Approx(p).epsilon(1e-13));
    if (p > 0) {
      CHECK((v[0] + v[1] + 30) % 2 == 0);
      CHECK(std::abs(v[0]) + std::abs(v[1]) <= 30);
    }
  });

  // every residue-and-hull point is actually reached
  for (int32_t x = -30; x <= 30; ++x)
    for (int32_t y = -30; y <= 30; ++y)
      if ((x + y + 30) % 2 == 0 && std::abs(x) + std::abs(y) <= 30)
        CHECK(t.at(key2(x, y)) > 0.0);

  // the 45-degree rotation factorizes this walk into two coin walks
  CHECK(t.at(key2(0, 0)) ==
        doctest::Approx(coin_pn(30, 0) * coin_pn(30, 0)).epsilon(1e-12));
  CHECK(t.at(key2(2, 0)) ==
        doctest::Approx(coin_pn(30, 2) * coin_pn(30, 2)).epsilon(1e-12));

  CHECK_THROWS_AS(exact_pn_convolution(k, 5000), std::runtime_error);
  CHECK_THROWS_AS(exact_pn_convolution(build_kernel(simple_z1()), -1),
                  std::invalid_argument);
}

TEST_CASE("local limit estimate against the binomial oracle") {
  const Kernel k = build_kernel(simple_z1());

  // at the drift the exponential factor is 1 and the constant is pinned
  const double e0 = llt_estimate(k, 100, key1(0));
  CHECK(e0 == doctest::Approx(2.0 / std::sqrt(200.0 * M_PI)).epsilon(1e-12));
  CHECK(e0 == doctest::Approx(0.07978845608028654).epsilon(1e-12));
  const double ratio0 = e0 / coin_pn(100, 0);
  CHECK(ratio0 >= 1.0);
  CHECK(ratio0 <= 1.01);

  // sloped target: estimate = |U| (2 pi n B_s)^{-1/2} e^{-n phi(1/2)}
  const double e50 = llt_estimate(k, 100, key1(50));
  const double phi_half = 0.13081203594113698;
  const double manual =
      2.0 * std::pow(2.0 * M_PI * 100.0 * 0.75, -0.5) * std::exp(-100.0 * phi_half);
  CHECK(e50 == doctest::Approx(manual).epsilon(1e-9));
  const double r50 = e50 / coin_pn(100, 50);
  CHECK(r50 >= 0.9);
  CHECK(r50 <= 1.1);

  CHECK_THROWS_AS(llt_estimate(k, 100, key1(3)), std::domain_error);    // residue
  CHECK_THROWS_AS(llt_estimate(k, 100, key1(100)), std::domain_error);  // boundary
  CHECK_THROWS_AS(llt_estimate(k, 100, key1(104)), std::domain_error);  // outside
}

TEST_CASE("large-deviation consistency of the exact table") {
  const Kernel k = build_kernel(simple_z1());
  const DensityTable t = exact_pn_convolution(k, 400);
  const double p = t.at(key1(200));
  CHECK(p > 0.0);
  const double rate = -std::log(p) / 400.0;
  CHECK(std::abs(rate - rate_phi(k, (Vec(1) << 0.5).finished())) <= 0.01);
}

TEST_CASE("estimator sweep over the admissible region") {
  const Kernel k1 = build_kernel(simple_z1());
  const BoundaryFit f1 = boundary_exponent_fit(k1);
  const auto rows1 = compare_lattice(k1, 200, 1.0, f1);
  CHECK(rows1.size() > 10);
  double rmin = 1e300, rmax = 0.0, esum = 0.0;
  for (const auto& r : rows1) {
    CHECK(r.regime == "llt");
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
    CHECK((r.v[0] + 200) % 2 == 0);
    CHECK(200.0 * std::pow(r.dist, 2.0 * f1.eta) >= 1.0);
    CHECK(r.exact == doctest::Approx(coin_pn(200, r.v[0])).epsilon(1e-12));
    rmin = std::min(rmin, r.ratio);
    rmax = std::max(rmax, r.ratio);
    esum += r.exact;
  }
  CHECK(esum <= 1.0 + 1e-12);
  CHECK(rmax / rmin <= 1.1);

  const Kernel k2 = build_kernel(simple_z2());
  const BoundaryFit f2 = boundary_exponent_fit(k2);
  CHECK(f2.verified);
  const auto rows2 = compare_lattice(k2, 100, 1.0, f2);
  CHECK(rows2.size() > 10);
  double esum2 = 0.0;
  bool saw_origin = false;
  for (const auto& r : rows2) {
    CHECK(r.ratio > 0.0);
    CHECK(std::isfinite(r.ratio));
    esum2 += r.exact;
    if (r.v[0] == 0 && r.v[1] == 0) {
      saw_origin = true;
      // 2/(pi n) against the squared coin walk
      CHECK(r.estimate == doctest::Approx(2.0 / (M_PI * 100.0)).epsilon(1e-10));
      CHECK(r.ratio >= 1.0);
      CHECK(r.ratio <= 1.02);
    }
  }
  CHECK(saw_origin);
  CHECK(esum2 <= 1.0 + 1e-12);

  // empty admissible region: tiny n with a huge gate
  const auto warn = compare_lattice(k1, 2, 1e9, f1);
  REQUIRE(warn.size() == 1);
  CHECK(warn[0].regime == "warning");
}
