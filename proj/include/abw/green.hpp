#pragma once

#include "abw/building.hpp"
#include "abw/lattice.hpp"

#include <cstdint>

namespace abw {

struct GreenResult {
  double value = 0;
  double tail_bound = 0;  // certified truncation bound when certified,
                          // otherwise the size of the applied correction
  int64_t terms = 0;      // number of summed powers (last n plus one)
  bool certified = false;
  bool critical = false;
};

// Resolvent series G_zeta(omega) = sum_n zeta^n p_n(omega).
//
// Subcritical (zeta * rho < 1): the one-step operator is normal with norm
// rho on square-summable functions, so p_n at any point is at most rho^n and
// the truncation error after N terms is below (zeta*rho)^{N+1}/(1-zeta*rho);
// summation stops as soon as that certificate is <= tol (or at cap, in which
// case certified stays false and tail_bound reports the open remainder).
//
// Critical (zeta * rho = 1 to 1e-12): the terms decay like n^{-r/2-|Phi+|}
// with no geometric reserve, so the series runs to the explicit cap and the
// square-root tail is removed by extrapolation from the half-cap partial sum;
// tail_bound carries the size of that correction and certified stays false.
//
// Past critical the series diverges and the call is a domain_error.
//
// A critical run needs a grid that resolves the largest summed power: the
// coefficient mass of ahat^n spreads with n and folds back at the grid size,
// and the density read-off rejects an under-resolved plan through its
// imaginary-residue gate.  Grid size N keeps the folded mass of ahat^n below
// that gate roughly while (N - |omega|)^2 stays above 2n log(1e7).
GreenResult green_series(const HeatPlan& plan, double zeta, const IKey& omega,
                         double tol, int64_t cap = 4000);

// Same series for an integer-lattice kernel, summed by incremental
// convolution on a box sized for the stopping time.
GreenResult green_series(const Kernel& k, double zeta, const IKey& omega,
                         double tol, int64_t cap = 4000);

// The tilt of a direction u in the subcritical regime: the unique real
// vector s_u with kappa(s_u) = 1/(zeta*rho) and grad kappa(s_u) parallel
// to u.  Found by bisection along the saddle curve x -> s(x*u/|u|), on which
// log kappa grows strictly from 0; both defining identities are re-verified
// on the result (1e-10 relative and 1e-8 angular) before it is returned.
Vec green_tilt(const Kernel& k, double zeta, const Vec& u);

// Boundary-regime estimate of G_zeta(omega), omega != 0:
//   subcritical:  P_omega(0) * |omega|^{-(r-1)/2 - |Phi+|} * exp(-<s_u, omega>)
//   critical:     P_omega(0) * |omega|^{2 - r - 2 |Phi+|}
// with u = omega.  On the integer lattice the spherical factor is 1 and
// |Phi+| is 0, so the same two displays cover both flavors.
double green_estimate(const Kernel& k, double zeta, const IKey& omega);

}  // namespace abw
