#pragma once

#include "abw/exppoly.hpp"
#include "abw/types.hpp"

namespace abw {

// Uniform grid on the torus R^r / 2*pi*L, where L is the lattice dual to the
// integer frequency lattice of the exponential polynomials being integrated
// (root lattice in the building setting, Z^r on the lattice side).  Nodes are
//   theta_j = theta_off + sum_i (j_i / N) * 2*pi * dual_basis_i ,
// so a term with integer key k contributes the separable phase
// prod_i omega_N^{k_i j_i} and trapezoid sums become exact DFT bins.
//
// The offset keeps every node away from the |c|^2 walls: for each positive
// coroot the pairing <theta_j, avee> is (2*pi/N) * (integer + frac), with
// frac independent of j, so one fractional-part check per coroot bounds the
// wall distance of the whole grid.
class TorusGrid {
 public:
  // wall_combos: per wall, the integer pairing coefficients of the coroot
  // against the dual basis columns.  Empty for wall-free (lattice) tori.
  TorusGrid(Mat dual_basis, std::vector<std::vector<int>> wall_combos, int N,
            double min_wall_dist = 1e-3);

  int rank() const { return r_; }
  int n() const { return N_; }
  size_t points() const { return points_; }
  const Mat& dual_basis() const { return dual_; }

  Vec node(const std::vector<int>& j) const;      // theta_j
  double offset_phase(const IKey& key) const;     // <theta_off, v(key)> (radians)
  double min_wall_distance() const { return achieved_wall_dist_; }

  // Cell volume |det(2 pi dual_basis)|; the calibration constant folds it in.
  double cell_volume() const;

 private:
  int r_, N_;
  size_t points_;
  Mat dual_;
  Vec off_frac_;  // theta_off = sum_i off_frac_[i] * 2*pi*dual_i
  double achieved_wall_dist_ = 0.0;
};

// Complex scalar field sampled on the grid, split planes, row-major with the
// last axis fastest.
struct Field {
  int r = 0, N = 0;
  std::vector<double> re, im;
  size_t size() const { return re.size(); }
};

Field make_field(const TorusGrid& g);

// field[j] += sum over poly terms of c_k exp(i <theta_j, v(k)>).
void synth_exp_poly(const TorusGrid& g, const ExpPoly& poly, Field& out);

// All DFT bins of the field: bins[b] = sum_j field[j] prod_i omega_N^{-b_i j_i}.
Field dft_all_bins(const TorusGrid& g, const Field& f);

// mean_j field[j] e^{-i<theta_j, v(key)>} given precomputed bins.
cplx mean_against_key(const TorusGrid& g, const Field& bins, const IKey& key);

cplx field_mean(const TorusGrid& g, const Field& f);

}  // namespace abw
