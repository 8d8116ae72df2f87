#include "abw/lattice.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace abw {
namespace {

constexpr int64_t kCellGuard = int64_t(1) << 25;

int64_t flat_index(const DensityTable& t, const IKey& v, int rank) {
  int64_t idx = 0;
  for (int i = 0; i < rank; ++i) {
    const int64_t c = v[i];
    if (c < t.lo[i] || c > t.hi[i]) return -1;
    idx = idx * (t.hi[i] - t.lo[i] + 1) + (c - t.lo[i]);
  }
  return idx;
}

}  // namespace

double DensityTable::at(const IKey& v) const {
  const int rank = static_cast<int>(lo.size());
  const int64_t idx = flat_index(*this, v, rank);
  return idx < 0 ? 0.0 : val[static_cast<size_t>(idx)];
}

void DensityTable::for_each(
    const std::function<void(const IKey&, double)>& f) const {
  const int rank = static_cast<int>(lo.size());
  IKey v{};
  for (int i = 0; i < rank; ++i) v[i] = static_cast<int32_t>(lo[i]);
  for (size_t idx = 0; idx < val.size(); ++idx) {
    f(v, val[idx]);
    int ax = rank - 1;
    while (ax >= 0 && v[ax] == hi[ax]) {
      v[ax] = static_cast<int32_t>(lo[ax]);
      --ax;
    }
    if (ax < 0) break;
    ++v[ax];
  }
}

double DensityTable::mass() const {
  long double s = 0.0L;
  for (double x : val) s += x;
  return static_cast<double>(s);
}

DensityTable exact_pn_convolution(const Kernel& k, int64_t n, int64_t n_cap) {
  if (k.flavor != Flavor::lattice)
    throw std::invalid_argument(
        "exact convolution tables are only built for integer-lattice walks");
  if (n < 0) throw std::invalid_argument("negative step count");
  if (n > n_cap)
    throw std::runtime_error(
        "step count " + std::to_string(n) + " exceeds the dense-table guard " +
        std::to_string(n_cap) +
        "; use the transform route (torus sampling) for long times");

  const int r = k.rank;
  DensityTable t;
  t.n = n;
  t.lo.assign(r, 0);
  t.hi.assign(r, 0);
  for (const IKey& s : k.support)
    for (int i = 0; i < r; ++i) {
      t.lo[i] = std::min<int64_t>(t.lo[i], int64_t(s[i]) * n);
      t.hi[i] = std::max<int64_t>(t.hi[i], int64_t(s[i]) * n);
    }

  std::vector<int64_t> len(r), stride(r);
  int64_t cells = 1;
  for (int i = 0; i < r; ++i) {
    len[i] = t.hi[i] - t.lo[i] + 1;
    if (cells > kCellGuard / len[i])
      throw std::runtime_error(
          "dense table would exceed the cell guard; use the transform route "
          "(torus sampling) instead");
    cells *= len[i];
  }
  stride[r - 1] = 1;
  for (int i = r - 2; i >= 0; --i) stride[i] = stride[i + 1] * len[i + 1];

  std::vector<double> cur(static_cast<size_t>(cells), 0.0);
  std::vector<double> next(static_cast<size_t>(cells), 0.0);
  int64_t origin = 0;
  for (int i = 0; i < r; ++i) origin += (0 - t.lo[i]) * stride[i];
  cur[static_cast<size_t>(origin)] = 1.0;

  for (int64_t step = 0; step < n; ++step) {
    convolution_step(k, t.lo, t.hi, cur, next);
    cur.swap(next);
  }

  t.val = std::move(cur);
  const double m = t.mass();
  if (std::abs(m - 1.0) > 1e-10)
    throw std::runtime_error("convolution mass drifted to " + std::to_string(m));
  return t;
}

void convolution_step(const Kernel& k, const std::vector<int64_t>& lo,
                      const std::vector<int64_t>& hi,
                      const std::vector<double>& cur,
                      std::vector<double>& next) {
  const int r = k.rank;
  std::vector<int64_t> stride(r);
  stride[r - 1] = 1;
  for (int i = r - 2; i >= 0; --i) stride[i] = stride[i + 1] * (hi[i + 1] - lo[i + 1] + 1);

  next.assign(cur.size(), 0.0);
  std::vector<int64_t> a(r), b(r), c(r);
  for (size_t si = 0; si < k.support.size(); ++si) {
    const IKey& s = k.support[si];
    const double w = k.cv[si];
    // source range keeping both ends of the shift inside the box
    int64_t doff = 0;
    for (int i = 0; i < r; ++i) {
      a[i] = lo[i] + std::max<int64_t>(0, -s[i]);
      b[i] = hi[i] - std::max<int64_t>(0, s[i]);
      c[i] = a[i];
      doff += int64_t(s[i]) * stride[i];
    }
    bool any = true;
    for (int i = 0; i < r; ++i) any = any && a[i] <= b[i];
    while (any) {
      int64_t base = 0;
      for (int i = 0; i + 1 < r; ++i) base += (c[i] - lo[i]) * stride[i];
      const int64_t i0 = a[r - 1] - lo[r - 1], i1 = b[r - 1] - lo[r - 1];
      const double* src = cur.data() + base + i0;
      double* dst = next.data() + base + i0 + doff;
      for (int64_t i = 0; i <= i1 - i0; ++i) dst[i] += w * src[i];
      int ax = r - 2;
      while (ax >= 0 && c[ax] == b[ax]) {
        c[ax] = a[ax];
        --ax;
      }
      if (ax < 0) break;
      ++c[ax];
    }
  }
}

double llt_estimate(const Kernel& k, int64_t n, const IKey& v) {
  if (k.flavor != Flavor::lattice)
    throw std::invalid_argument(
        "the local limit estimator applies to integer-lattice walks");
  if (n <= 0) throw std::invalid_argument("step count must be positive");
  if (!support_residue_ok(k, v, n))
    throw std::domain_error(
        "target point is not reachable in this many steps (wrong residue "
        "class of the step-difference lattice)");
  const Vec delta = key_to_vec(v, k.rank) / static_cast<double>(n);
  if (!(dist_to_boundary(k, delta) > 0.0))
    throw std::domain_error(
        "velocity v/n lies outside the open hull of the step set");
  const Saddle sp = saddle(k, delta);
  return static_cast<double>(k.u_count) *
         std::pow(2.0 * M_PI * static_cast<double>(n), -0.5 * k.rank) *
         std::pow(sp.det_B, -0.5) * std::exp(-static_cast<double>(n) * sp.phi);
}

std::vector<LatticeRow> compare_lattice(const Kernel& k, int64_t n, double K,
                                        const BoundaryFit& fit) {
  const DensityTable t = exact_pn_convolution(k, n);
  std::vector<LatticeRow> rows;
  t.for_each([&](const IKey& v, double p) {
    if (!(p > 0.0)) return;
    const Vec delta = key_to_vec(v, k.rank) / static_cast<double>(n);
    const double dist = dist_to_boundary(k, delta);
    if (!(dist > 0.0)) return;
    if (!(static_cast<double>(n) * std::pow(dist, 2.0 * fit.eta) >= K)) return;
    const Saddle sp = saddle(k, delta);
    LatticeRow row;
    row.n = n;
    row.v = v;
    row.exact = p;
    row.estimate = llt_estimate(k, n, v);
    row.ratio = row.estimate / p;
    row.dist = dist;
    row.det_nb = std::pow(static_cast<double>(n), k.rank) * sp.det_B;
    row.phi = sp.phi;
    row.regime = "llt";
    rows.push_back(row);
  });
  if (rows.empty()) {
    LatticeRow warn;
    warn.n = n;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    warn.exact = warn.estimate = warn.ratio = nan;
    warn.dist = warn.det_nb = warn.phi = nan;
    warn.regime = "warning";
    rows.push_back(warn);
  }
  return rows;
}

}  // namespace abw
