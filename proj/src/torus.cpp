#include "abw/torus.hpp"

#include "abw/simd.hpp"

#include <cmath>

namespace abw {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double frac_dist_to_int(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

}  // namespace

TorusGrid::TorusGrid(Mat dual_basis, std::vector<std::vector<int>> wall_combos,
                     int N, double min_wall_dist)
    : r_(static_cast<int>(dual_basis.cols())), N_(N), dual_(std::move(dual_basis)) {
  if (N_ < 2) throw std::invalid_argument("TorusGrid: resolution must be >= 2");
  if (r_ < 1 || r_ > kMaxRank) throw std::invalid_argument("TorusGrid: bad rank");
  points_ = 1;
  for (int i = 0; i < r_; ++i) {
    if (points_ > (size_t(1) << 28) / size_t(N_))
      throw std::invalid_argument("TorusGrid: grid too large");
    points_ *= size_t(N_);
  }

  // Offset as fractions of a grid step.  Each wall requires the fractional
  // part of sum_i u_i * combo_i to stay away from the integers by
  // min_wall_dist * N / (2 pi); bump the seed deterministically until every
  // wall clears, so the achieved distance is certified, not hoped for.
  const double need = min_wall_dist * double(N_) / kTwoPi;
  off_frac_ = Vec::Zero(r_);
  bool ok = false;
  for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
    Vec u(r_);
    for (int i = 0; i < r_; ++i) {
      double x = 0.5 + 0.3819660112501051 * (1.0 + 0.29 * i) * (1.0 + attempt * 0.173);
      u[i] = x - std::floor(x);
    }
    double worst = 1.0;
    for (const auto& combo : wall_combos) {
      double s = 0;
      for (int i = 0; i < r_; ++i) s += u[i] * combo[i];
      worst = std::min(worst, frac_dist_to_int(s));
    }
    if (wall_combos.empty()) worst = 0.5;
    if (worst >= need) {
      ok = true;
      off_frac_ = u / double(N_);
      achieved_wall_dist_ = worst * kTwoPi / double(N_);
    }
  }
  if (!ok)
    throw std::runtime_error(
        "TorusGrid: could not place offset " + std::to_string(min_wall_dist) +
        " away from every wall at N = " + std::to_string(N_) +
        "; lower the resolution or the wall margin");
}

Vec TorusGrid::node(const std::vector<int>& j) const {
  if (static_cast<int>(j.size()) != r_)
    throw std::invalid_argument("TorusGrid::node: index rank mismatch");
  Vec t = Vec::Zero(r_);
  for (int i = 0; i < r_; ++i)
    t += (off_frac_[i] + double(j[i]) / double(N_)) * kTwoPi * dual_.col(i);
  return t;
}

double TorusGrid::offset_phase(const IKey& key) const {
  double s = 0;
  for (int i = 0; i < r_; ++i) s += off_frac_[i] * double(key[i]);
  return kTwoPi * s;
}

double TorusGrid::cell_volume() const {
  return std::abs((kTwoPi * dual_).determinant());
}

Field make_field(const TorusGrid& g) {
  Field f;
  f.r = g.rank();
  f.N = g.n();
  f.re.assign(g.points(), 0.0);
  f.im.assign(g.points(), 0.0);
  return f;
}

void synth_exp_poly(const TorusGrid& g, const ExpPoly& poly, Field& out) {
  if (poly.rank() != g.rank())
    throw std::invalid_argument("synth_exp_poly: rank mismatch");
  const auto& k = simd::get();
  const int r = g.rank(), N = g.n();
  const size_t rows = g.points() / size_t(N);

  for (const auto& [key, coeff] : poly.terms()) {
    // Per-axis unit steps omega_N^{k_i}; the offset joins the coefficient.
    std::vector<cplx> step(r);
    for (int i = 0; i < r; ++i) {
      const double ang = kTwoPi * double(key[i]) / double(N);
      step[i] = cplx(std::cos(ang), std::sin(ang));
    }
    const double po = g.offset_phase(key);
    const cplx c0 = coeff * cplx(std::cos(po), std::sin(po));

    // Walk rows in row-major order keeping the outer-phase odometer.
    std::vector<int> idx(r > 1 ? r - 1 : 0, 0);
    std::vector<cplx> axis_phase(r > 1 ? r - 1 : 0, cplx(1, 0));
    for (size_t row = 0; row < rows; ++row) {
      cplx base = c0;
      for (int i = 0; i < r - 1; ++i) base *= axis_phase[i];
      k.cacc_ramp(out.re.data() + row * size_t(N), out.im.data() + row * size_t(N),
                  size_t(N), base.real(), base.imag(),
                  step[r - 1].real(), step[r - 1].imag());
      // odometer on the outer axes, last of them fastest
      for (int i = r - 2; i >= 0; --i) {
        axis_phase[i] *= step[i];
        if (++idx[i] < N) break;
        idx[i] = 0;
        axis_phase[i] = cplx(1, 0);
      }
    }
  }
}

Field dft_all_bins(const TorusGrid& g, const Field& f) {
  const auto& k = simd::get();
  const int r = g.rank(), N = g.n();
  Field cur = f;
  Field nxt = cur;

  // Precomputed bin phases omega_N^{-b}
  std::vector<cplx> u(N);
  for (int b = 0; b < N; ++b) {
    const double ang = -kTwoPi * double(b) / double(N);
    u[b] = cplx(std::cos(ang), std::sin(ang));
  }

  const size_t rows = g.points() / size_t(N);
  for (int axis = 0; axis < r; ++axis) {
    // Transform the (contiguous) last axis of cur.
    for (size_t row = 0; row < rows; ++row) {
      const double* sre = cur.re.data() + row * size_t(N);
      const double* sim = cur.im.data() + row * size_t(N);
      double* dre = nxt.re.data() + row * size_t(N);
      double* dim = nxt.im.data() + row * size_t(N);
      for (int b = 0; b < N; ++b)
        k.cdot_ramp(sre, sim, size_t(N), u[b].real(), u[b].imag(), &dre[b], &dim[b]);
    }
    if (r == 1) { cur = nxt; break; }
    // Rotate axes: out[j_r, j_1 .. j_{r-1}] = in[j_1 .. j_r]; after r rounds
    // every axis has been the contiguous one exactly once and the layout is
    // back to the original order.
    const size_t inner = size_t(N);
    const size_t outer = g.points() / inner;
    for (size_t o = 0; o < outer; ++o)
      for (size_t b = 0; b < inner; ++b) {
        cur.re[b * outer + o] = nxt.re[o * inner + b];
        cur.im[b * outer + o] = nxt.im[o * inner + b];
      }
  }
  return cur;
}

cplx mean_against_key(const TorusGrid& g, const Field& bins, const IKey& key) {
  const int r = g.rank(), N = g.n();
  size_t flat = 0;
  for (int i = 0; i < r; ++i) {
    int b = int(((key[i] % N) + N) % N);
    flat = flat * size_t(N) + size_t(b);
  }
  const double po = -g.offset_phase(key);
  const cplx rot(std::cos(po), std::sin(po));
  return rot * cplx(bins.re[flat], bins.im[flat]) / double(g.points());
}

cplx field_mean(const TorusGrid& g, const Field& f) {
  const auto& k = simd::get();
  return cplx(k.sum(f.re.data(), f.re.size()), k.sum(f.im.data(), f.im.size())) /
         double(g.points());
}

}  // namespace abw
