#pragma once

#include <cstdint>
#include <vector>

namespace abw {

// A sequence of subsets C_1, ..., C_r of a ground set {0, ..., nx - 1},
// each stored as a bitmask.  Ground sets are capped at 16 elements so that
// subsets, partial partitions, and multi-indices stay exhaustively
// enumerable.
struct SetSystem {
  int nx = 0;                  // ground set size, 0..16
  std::vector<uint32_t> sets;  // sets[j] = bitmask of C_{j+1}

  int r() const { return int(sets.size()); }
};

// A multi-index gamma is admissible when pairwise-disjoint blocks
// X_j subset of C_j exist with |X_j| = gamma[j].  Decided by bipartite
// feasibility: source -> block j with capacity gamma[j], block -> its
// elements, element -> sink with capacity one; admissible iff the max flow
// saturates |gamma|.
bool is_admissible(const SetSystem& sys, const std::vector<int>& gamma);

// The same decision by exhaustive backtracking over partial partitions;
// kept as the reference oracle for the flow decision.
bool is_admissible_brute(const SetSystem& sys, const std::vector<int>& gamma);

// The blocked directions of an admissible gamma: all j for which gamma + e_j
// is no longer admissible.  Indices are 0-based and ascending.
std::vector<int> blocked_set(const SetSystem& sys,
                             const std::vector<int>& gamma);

// For an admissible gamma, every realization is claimed to fill the blocked
// directions completely: the union of X_j over blocked j equals the union of
// C_j over blocked j, no matter which realization was chosen.  Verifies that
// identity on every partial partition realizing gamma (exhaustive
// backtracking) and returns true iff all of them satisfy it; a false return
// therefore indicates a defect, not a counterexample.
bool blocked_union_check(const SetSystem& sys, const std::vector<int>& gamma);

}  // namespace abw
