#pragma once

#include "abw/exppoly.hpp"
#include "abw/sphfun.hpp"

#include <cstdint>

namespace abw {

// Which geometry the walk lives on: vertices of an affine building (steps are
// isotropic averages over spheres indexed by dominant coweights) or the plain
// integer lattice (steps are raw vectors with probabilities).
enum class Flavor { building, lattice };

struct WalkStep {
  Vec mu;        // dominant coweight (building) or integer step (lattice)
  double a = 0;  // probability mass of this step class
};

struct WalkSpec {
  Flavor flavor = Flavor::lattice;
  SphCtxPtr ctx;  // building flavor only
  int rank = 0;   // ambient dimension for lattice flavor (building: from ctx)
  std::vector<WalkStep> steps;
};

// Supporting halfspace <normal, x> <= offset, |normal| = 1, of the support hull.
struct Facet {
  Vec normal;
  double offset = 0;
};

// One-step transform with everything downstream modules read off it: the
// spectral radius, the normalized kernel and its support geometry, and the
// aperiodicity lattice data.
struct Kernel {
  Flavor flavor = Flavor::lattice;
  int rank = 0;
  SphCtxPtr ctx;   // null for lattice flavor
  Mat basis;       // key basis columns: fundamental coweights, or identity

  ExpPoly ahat{0};   // transform of the step distribution
  double rho = 0;    // spectral radius, the transform at the origin
  ExpPoly kappa{0};  // ahat / rho, total mass 1

  std::vector<IKey> support;     // support keys, deterministic order
  std::vector<Vec> support_vec;  // basis * key per support point
  std::vector<double> cv;        // kappa coefficient per support point
  double max_step_norm = 0;

  std::vector<Facet> facets;  // convex hull of support_vec

  // Difference-lattice data: U * [key_i - key_0 columns] * V = diag(d).
  std::vector<std::vector<int64_t>> snf_u;
  std::vector<int64_t> snf_d;
  IKey base_key{};
  long long u_count = 0;      // points of the unit-modulus set
  std::vector<Vec> u_points;  // representatives theta_0 (ambient coords)

  // kappa(z) = sum_v c_v exp(<z,v>), and the same on the imaginary axis.
  cplx kappa_eval(const CVec& z) const;
  cplx kappa_itheta(const Vec& theta) const;
  // log kappa(s) for real s, the cumulant generating function of the steps.
  double log_kappa(const Vec& s) const;
};

// Validates the spec (positive masses summing to 1, distinct dominant or
// integer steps, irreducibility) and assembles the kernel; every numerical
// invariant that construction promises is checked, not assumed.
Kernel build_kernel(const WalkSpec& spec);

// The set where |kappa(i theta)| = 1: its size is the index of the
// difference lattice span{v - v'} in the ambient lattice (by integer Smith
// reduction), and the returned representatives satisfy
// exp(i<theta_0, v - v'>) = 1 for every support pair (checked to 1e-12).
std::pair<long long, std::vector<Vec>> periodicity_set(const Kernel& k);

// min over facets of (offset - <normal, delta>); positive iff delta lies in
// the open support hull.
double dist_to_boundary(const Kernel& k, const Vec& delta);

// Whether an n-step path can end on this key at all: key - n*base_key must
// lie in the difference lattice.
bool support_residue_ok(const Kernel& k, const IKey& key, int64_t n);

}  // namespace abw
