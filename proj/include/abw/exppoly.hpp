#pragma once

#include "abw/types.hpp"

#include <map>

namespace abw {

// Finite sum  f(z) = sum_k c_k exp(<z, B k>)  with integer frequency keys k in
// a fixed column basis B carried by the caller.  The term map is ordered so
// every iteration (products, truncation, reporting) is deterministic.
class ExpPoly {
 public:
  explicit ExpPoly(int rank) : rank_(rank) {}

  int rank() const { return rank_; }
  const std::map<IKey, cplx>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }

  void add(const IKey& k, cplx c);
  void scale(cplx f);

  ExpPoly mul(const ExpPoly& other) const;
  ExpPoly pow(int n) const;  // binary exponentiation, n >= 0

  // Drop terms with |c| <= tol * max|c|.
  void truncate(double rel_tol);

  double max_abs_coeff() const;

  // Per-axis key extent: max_k k_i - min_k k_i (0 for empty).
  std::array<int32_t, kMaxRank> key_span() const;
  std::array<int32_t, kMaxRank> key_min() const;
  std::array<int32_t, kMaxRank> key_max() const;

  // Evaluate with the dual argument w = B^T z already applied:
  // sum_k c_k exp(sum_i k_i w_i).
  cplx eval_dual(const CVec& w) const;

 private:
  int rank_;
  std::map<IKey, cplx> terms_;
};

}  // namespace abw
