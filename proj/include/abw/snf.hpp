#pragma once

#include <cstdint>
#include <vector>

namespace abw {

// Smith normal form of an integer matrix A (r rows, m columns):
//   U * A * V = D  with U (r x r), V (m x m) unimodular and D diagonal,
//   d_1 | d_2 | ... | d_k >= 0.
// Sizes here are tiny (rank <= 8), so plain int64 row/column reduction with
// pivot-size control is enough; overflow is checked rather than assumed away.
struct SmithResult {
  std::vector<std::vector<int64_t>> U, V;
  std::vector<int64_t> diag;  // length min(r, m), divisibility-ordered
  int rank = 0;               // number of nonzero diagonal entries
};

SmithResult smith_normal_form(std::vector<std::vector<int64_t>> A);

}  // namespace abw
