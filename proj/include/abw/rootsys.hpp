#pragma once

#include "abw/types.hpp"

#include <map>

namespace abw {

// Reduced irreducible root systems realized in an orthonormal frame of rank-r
// Euclidean space (simply-laced normalization |alpha|^2 = 2 for long roots,
// classical tables otherwise).  Types A..G with classical rank validity;
// everything downstream works in the basis-free inner product, so vectors
// returned here plug straight into the spectral machinery.
enum class RootKind { A, B, C, D, E, F, G };

RootKind root_kind_from_string(const std::string& s);
std::string to_string(RootKind k);

struct WeylGroup {
  std::vector<Mat> elements;           // orthogonal matrices, identity first
  std::vector<int> length;             // Coxeter length per element
  std::vector<std::vector<int>> word;  // one reduced word per element
  int64_t order() const { return static_cast<int64_t>(elements.size()); }
};

struct RootSystem {
  RootKind kind;
  int rank;

  Mat simple;        // r x r, column i = simple root alpha_i
  Mat cosimple;      // column i = coroot alpha_i^vee
  Mat fund_coweight; // column i = lambda_i with <alpha_i, lambda_j> = delta_ij
  Mat positive;      // r x |Phi+| positive roots, simple roots first
  Mat copositive;    // matching coroots
  std::vector<std::vector<int>> pos_in_simple;  // integer coords in simple basis
  Vec highest_root;
  std::vector<int> marks;      // highest root coords in simple basis
  Vec rho_coweight;            // half sum of positive coroots = sum of fund coweights

  int num_positive() const { return static_cast<int>(positive.cols()); }

  // Root-length classes: class id per simple root and per positive root.
  // For irreducible systems these are exactly the Weyl conjugacy classes of
  // reflections, which is what parameter assignment keys on.
  std::vector<int> simple_class;
  std::vector<int> positive_class;
  int num_classes = 1;

  // Coordinates of v in the fundamental coweight basis (exact integers for
  // coweight lattice points; rounded with a tolerance check).
  std::vector<int> coweight_coords(const Vec& v, double tol = 1e-9) const;
  Vec coweight_point(const std::vector<int>& coords) const;

  bool is_dominant(const Vec& v, double tol = 1e-12) const;
};

// Validates (kind, rank) and builds the full realization.
RootSystem build_root_system(RootKind kind, int rank);

// Explicit enumeration by closure over simple reflections.  Refuses orders
// beyond the cap (E7, E8) since downstream desk-scale use never needs them.
WeylGroup weyl_group(const RootSystem& rs, int64_t max_order = 2'000'000);

int64_t weyl_order(RootKind kind, int rank);  // closed-form group order

// Parameters q_alpha > 1, constant on reflection conjugacy classes.
struct QParams {
  std::vector<double> by_class;  // indexed by root class id
  double for_positive(const RootSystem& rs, int i) const {
    return by_class[rs.positive_class[i]];
  }
};

QParams make_q_params(const RootSystem& rs, const std::vector<double>& q_per_simple);

// Poincare series W(q^{-1}) = sum_w prod over the word of q_{alpha_i}^{-1},
// and the plain polynomial W(q) used for sanity checks.
double poincare_q_inverse(const RootSystem& rs, const WeylGroup& w, const QParams& q);

// Product over positive roots q_alpha^{<alpha/2, v>} appearing in the
// spherical normalizations; returned as log to keep scales sane.
double log_q_halfsum(const RootSystem& rs, const QParams& q, const Vec& v);

// w in W with w.v dominant, plus the element index found.
Vec to_dominant(const RootSystem& rs, const Vec& v);

}  // namespace abw
