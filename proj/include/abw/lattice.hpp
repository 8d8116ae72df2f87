#pragma once

#include "abw/rate.hpp"
#include "abw/walk.hpp"

#include <functional>

namespace abw {

// Exact n-step distribution of a lattice-flavor kernel, stored dense over the
// reachable bounding box (row major, axis 0 slowest).
struct DensityTable {
  int64_t n = 0;
  std::vector<int64_t> lo, hi;  // inclusive per-axis bounds
  std::vector<double> val;

  double at(const IKey& v) const;  // 0 outside the box
  void for_each(const std::function<void(const IKey&, double)>& f) const;
  double mass() const;
};

// n-fold convolution of the step distribution.  The cap guards the dense
// table size; past it the transform-based route (torus sampling) is the right
// tool and the error says so.
DensityTable exact_pn_convolution(const Kernel& k, int64_t n,
                                  int64_t n_cap = 4096);

// One walk step on the fixed box [lo, hi] (inclusive, row major, axis 0
// slowest): next = sum over steps s of a_s * shift(cur, s).  Mass stepping
// outside the box is dropped, so size the box to cover every reachable
// point.  Shared by the table builder and the resolvent series.
void convolution_step(const Kernel& k, const std::vector<int64_t>& lo,
                      const std::vector<int64_t>& hi,
                      const std::vector<double>& cur,
                      std::vector<double>& next);

// Local-limit estimate |U| (2 pi)^{-r/2} (det nB_s)^{-1/2} e^{-n phi(v/n)}
// at the saddle s of the velocity v/n.  |U| counts the torus points where
// the transform has unit modulus; off the reachable residue class of v the
// true p_n vanishes and the call is an error.
double llt_estimate(const Kernel& k, int64_t n, const IKey& v);

struct LatticeRow {
  int64_t n = 0;
  IKey v{};
  double exact = 0, estimate = 0, ratio = 0;
  double dist = 0, det_nb = 0, phi = 0;
  std::string regime;  // "llt", or "warning" for an empty admissible region
};

// Exact vs estimate over every n-step support point v whose velocity passes
// the admissibility gate n * dist(v/n)^{2 eta} >= K with the fitted eta.
std::vector<LatticeRow> compare_lattice(const Kernel& k, int64_t n, double K,
                                        const BoundaryFit& fit);

}  // namespace abw
