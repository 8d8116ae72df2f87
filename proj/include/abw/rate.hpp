#pragma once

#include "abw/walk.hpp"

namespace abw {

// Saddle data at a velocity delta inside the support hull: the maximizer s of
// <x, delta> - log kappa(x), the rate value, and the step-covariance form at s.
struct Saddle {
  Vec delta;
  Vec s;
  double phi = 0;
  Mat B;                // covariance quadratic form at s
  double det_B = 0;
  double inv_norm = 0;  // spectral norm of B^{-1}
  double dist = 0;      // boundary distance of delta
  int newton_iters = 0;
};

// B_x(u,u') = (1/2) sum_{v,v'} w_v w_{v'} <u,v-v'><u',v-v'> with weights
// w_v = c_v e^{<x,v>}/kappa(x); equals the Hessian of log kappa at x.
Mat hessian_B(const Kernel& k, const Vec& x);

// Damped Newton for grad log kappa(s) = delta from s = 0, backtracking on the
// gradient norm.  Unique solution exists for every delta in the open hull.
Saddle saddle(const Kernel& k, const Vec& delta);

// phi(delta) = <s, delta> - log kappa(s) and its gradient (= s).
double rate_phi(const Kernel& k, const Vec& delta);
Vec grad_phi(const Kernel& k, const Vec& delta);

// Taylor-remainder integrals along the imaginary segment x + it theta:
//   phi_var = -int_0^1 (1-t)   D_theta^2 log kappa(x + it theta) dt
//   psi_var = -3i int_0^1 (1-t)^2 D_theta^3 log kappa(x + it theta) dt
// by Gauss-Legendre quadrature.  Valid on ||theta|| < 1/(4 max ||v||), where
// the transform stays away from zero.
cplx phi_var(const Kernel& k, const Vec& x, const Vec& theta, int nodes = 32);
cplx psi_var(const Kernel& k, const Vec& x, const Vec& theta, int nodes = 32);

// Fitted boundary exponent: smallest eta in {1, 1.5, ..., 8} and constant c
// with e^{<s,v>} >= c * kappa(s) * dist(delta)^eta over a training grid, then
// verified on a disjoint finer hold-out grid.
struct BoundaryFit {
  double eta = 0;
  double c = 0;
  bool verified = false;
  double worst_margin = 0;  // min hold-out ratio / c; >= 1 when verified
};
BoundaryFit boundary_exponent_fit(const Kernel& k);

// Largest pairwise distance of the support points.
double hull_diameter(const Kernel& k);

// Axis-aligned scan of the hull at spacing rel_spacing * diameter, keeping
// points with boundary distance > min_rel_dist * diameter; phase shifts the
// grid by that fraction of one spacing (for disjoint hold-out grids).
std::vector<Vec> hull_grid(const Kernel& k, double rel_spacing,
                           double min_rel_dist, double phase = 0.0);

}  // namespace abw
