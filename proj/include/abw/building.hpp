#pragma once

#include "abw/rate.hpp"
#include "abw/sphfun.hpp"
#include "abw/walk.hpp"

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace abw {

// Everything the exact building-side density needs, assembled once per
// (walk, resolution) pair: the offset torus grid, the sampled Plancherel
// weight 1/c, the sampled one-step transform, and the calibration constant.
//
// The constant comes from self-calibration: the n = 0 density at the origin
// is exactly 1, which forces cal = 1 / mean(1/c).  An independent route,
// c_norm = [ (W(q^{-1}) / |W|) * mean(1/|c|^2) ]^{-1}, must agree; a gap
// between the two means the grid or the weight sampling is defective, and
// construction refuses to hand out a plan in that state.
struct HeatPlan {
  Kernel k;
  TorusGrid grid;
  Field invc;    // 1/c(i theta) per node
  Field ahat;    // one-step transform per node
  double cal = 0;
  double c_norm = 0;
};

HeatPlan make_heat_plan(const Kernel& k, int N);

// The calibration constant alone, for a context without a walk: the inverse
// of (W(q^{-1}) / |W|) * mean(1/|c|^2) on the offset grid at resolution N,
// cross-checked against the smooth-route mean of 1/c at the same resolution.
// Tends to 1 as every q -> 1 (flat torus measure).
double plancherel_calibrate(const SphericalContext& ctx, int N);

// Exact n-step density p_n(omega): probability of standing on one fixed
// vertex at spherical distance omega from the start.  omega is a dominant
// key in the fundamental-coweight basis.  The value is the calibrated
// inverse spherical transform of ahat^n; a nonvanishing imaginary residue
// (beyond quadrature noise) raises an error instead of being discarded.
double exact_pn_quadrature(const HeatPlan& plan, int64_t n, const IKey& omega);

// Calibrated read-off cal * pref(omega) * Re(mean) from a torus mean already
// in hand, with the shared imaginary-residue gate; building blocks like the
// resolvent series use it to turn incremental field means into densities.
double density_from_mean(const HeatPlan& plan, const IKey& omega, cplx mean);

// All dominant keys reachable in n steps (velocity inside the closed support
// hull), each with its exact density.  Includes parity-suppressed points
// whose density is numerically zero.
std::vector<std::pair<IKey, double>> exact_pn_all(const HeatPlan& plan,
                                                  int64_t n);

// sum over omega of N_omega * p_n(omega); equals 1 when the resolution
// resolves every frequency that n steps can reach.
double building_mass(const HeatPlan& plan, int64_t n);

// Expand an exponential polynomial with W-invariant real spectrum in the
// spherical basis: f = sum_omega b_omega P_omega.  Elimination is triangular
// in the dominance order (each P_omega has leading coefficient at omega and
// tail strictly below), so coefficients are read off the top key downward.
// A degenerate pivot or a final residual above 1e-10 relative is an error.
std::map<IKey, double> macdonald_expand(const SphericalContext& ctx,
                                        const ExpPoly& f);

// Exact density by a route independent of quadrature: expand ahat^n in the
// spherical basis and divide the omega coefficient by the sphere size
// N_omega.  Exponential-size bookkeeping, so n must stay small; oversize
// expansions raise an error that points at the quadrature route.
double exact_pn_crosscheck(const Kernel& k, int64_t n, const IKey& omega);

// Distance-distribution oracle on the (q+1)-regular tree: steps is a list of
// (radius m, probability) pairs, and the return value holds the per-vertex
// density p_n at distances 0..n*max_m.  Runs on the distance chain with the
// three-term radius recurrence, no transform involved, so it is an
// independent check of both exact routes at rank one.
std::vector<double> tree_exact_pn(
    double q, const std::vector<std::pair<int, double>>& steps, int64_t n);

// Tilted local estimate of p_n(omega): the product of the q-exponential
// prefactor, the Gaussian volume factor det(n B_s)^{-1/2}, the large
// -deviation factor rho^n exp(-n phi(omega/n)), and the root-wise
// sinh<s, avee/2> factors, with the saddle taken at the shifted velocity
// delta = (omega + rho_coweight) / (n + r).  Requires delta and omega/n
// inside the open support hull; outside raises domain_error.
double heat_estimate_tilted(const Kernel& k, int64_t n, const IKey& omega);

// Fixed-velocity local estimate of p_n(omega):
//   n^{-r/2 - |Phi+|} * rho^n * exp(-n phi(omega/n)) * P_omega(0).
// Valid on rays where dist(omega/n, hull boundary) >= eps; closer to the
// boundary raises domain_error naming the failed hypothesis.
double heat_estimate_fixed_velocity(const Kernel& k, int64_t n,
                                    const IKey& omega, double eps = 0.05);

// Sweep every reachable omega at time n and test the global upper bound
//   p_n(omega) <= c_const * n^{n_exp} * rho^n exp(-n phi(omega/n)) * P_omega(0)
// margin-by-margin.  phi extends continuously to the closed hull; for
// boundary velocities the saddle is taken a hair inside (the clip distance
// is far below double noise in phi).  Never throws on boundary points.
struct UpperBoundReport {
  bool pass = false;
  double worst_margin = 0;  // max over omega of p_n / bound
  IKey worst_omega{};
};

UpperBoundReport global_upper_bound(const HeatPlan& plan, int64_t n,
                                    double n_exp, double c_const);

}  // namespace abw
