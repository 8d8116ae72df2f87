#pragma once

#include "abw/rootsys.hpp"
#include "abw/torus.hpp"
#include "abw/types.hpp"

#include <memory>

namespace abw {

// Precomputed data for spherical-function work: the root system, its Weyl
// group, parameters, and per-element images of the coroots so evaluating the
// W-sum costs one small matrix product per element.
struct SphericalContext {
  RootSystem rs;
  WeylGroup wg;
  QParams q;
  double poincare_qinv;            // W(q^{-1})
  std::vector<double> sign;        // (-1)^{l(w)}
  std::vector<Mat> winv;           // w^{-1} = w^T
  // w^{-1} alpha_j^vee = sign * alpha_m^vee, stored as (m, sign) per element
  // and positive root.  Evaluation builds every Weyl term from one shared set
  // of canonical pairings <z, alpha_m^vee>, which keeps the alternating
  // cancellation exact in floating point instead of drowning it in
  // independent per-term rounding of mathematically equal pairings.
  std::vector<std::vector<std::pair<int, int>>> cop_perm;
  std::vector<std::vector<int>> covee_pair;  // <alpha_i, avee_j> integer table
  std::vector<double> log_q_pos;   // log q_alpha per positive root

  int rank() const { return rs.rank; }
  int npos() const { return rs.num_positive(); }
};

using SphCtxPtr = std::shared_ptr<const SphericalContext>;

SphCtxPtr make_spherical_context(RootKind kind, int rank,
                                 const std::vector<double>& q_per_simple);

// c(z) = prod over positive roots of (1 - q^{-1} e^{-<z,avee>}) / (1 - e^{-<z,avee>}).
// Defined off the walls <z,avee> in 2*pi*i*Z; poles raise domain_error.
cplx c_function(const SphericalContext& ctx, const CVec& z);

struct MacdonaldValue {
  cplx value;
  bool limit_mode = false;   // argument was on (or near) a wall
  double residual = 0.0;     // extrapolation residual estimate when limit_mode
  int nodes = 0;             // extrapolation nodes actually used
};

// Spherical function P_lambda(z) for a dominant coweight lattice point lambda.
// Off walls this is the W-sum of c-function terms (evaluated in a cancellation
// -safe antisymmetrized form); on walls the value is filled in by Richardson
// extrapolation along z + eps*u with u strictly dominant.  A residual above
// 1e-8 relative is an error.
MacdonaldValue macdonald_eval(const SphericalContext& ctx, const Vec& lambda,
                              const CVec& z);

// Convenience: P_lambda at z = 0 (always limit mode).
MacdonaldValue macdonald_at_zero(const SphericalContext& ctx, const Vec& lambda);

// P_lambda as an exponential polynomial over the coweight lattice (keys in the
// fundamental-coweight basis), recovered by DFT on an offset torus grid and
// truncated at 1e-12 relative.  Support is contained in the convex hull of
// the W-orbit of lambda.
ExpPoly macdonald_exp_poly(const SphericalContext& ctx, const Vec& lambda);

// Torus grid sized for this context (walls from the positive coroots).
TorusGrid make_context_grid(const SphericalContext& ctx, int N);

// Pole-free Plancherel weight fields on an offset grid:
//   invc_field  : 1/c(i theta) per node
//   invc2_field : 1/|c(i theta)|^2 per node (imaginary plane zeroed)
Field invc_field(const SphericalContext& ctx, const TorusGrid& grid);
Field invc2_field(const SphericalContext& ctx, const TorusGrid& grid);

// Number of vertices at spherical distance lambda from a fixed vertex,
// computed from the calibrated Plancherel quadrature of |P_lambda|^2.
double vertex_count(const SphericalContext& ctx, const Vec& lambda);

}  // namespace abw
