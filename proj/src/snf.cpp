#include "abw/snf.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace abw {
namespace {

using Row = std::vector<int64_t>;
using M = std::vector<Row>;

M identity(size_t n) {
  M I(n, Row(n, 0));
  for (size_t i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

void check(int64_t v) {
  // Entries stay far below this at sane inputs; trip loudly if they do not.
  if (std::llabs(v) > (int64_t(1) << 56))
    throw std::overflow_error("smith_normal_form: entry overflow, input too large");
}

void row_op(M& A, M& U, size_t i, size_t j, int64_t f) {  // row_i -= f * row_j
  for (size_t c = 0; c < A[i].size(); ++c) { A[i][c] -= f * A[j][c]; check(A[i][c]); }
  for (size_t c = 0; c < U[i].size(); ++c) { U[i][c] -= f * U[j][c]; check(U[i][c]); }
}

void col_op(M& A, M& V, size_t i, size_t j, int64_t f) {  // col_i -= f * col_j
  for (size_t r = 0; r < A.size(); ++r) { A[r][i] -= f * A[r][j]; check(A[r][i]); }
  for (size_t r = 0; r < V.size(); ++r) { V[r][i] -= f * V[r][j]; check(V[r][i]); }
}

void swap_rows(M& A, M& U, size_t i, size_t j) { std::swap(A[i], A[j]); std::swap(U[i], U[j]); }

void swap_cols(M& A, M& V, size_t i, size_t j) {
  for (auto& row : A) std::swap(row[i], row[j]);
  for (auto& row : V) std::swap(row[i], row[j]);
}

}  // namespace

SmithResult smith_normal_form(M A) {
  const size_t r = A.size();
  const size_t m = r ? A[0].size() : 0;
  SmithResult out;
  out.U = identity(r);
  out.V = identity(m);
  if (r == 0 || m == 0) return out;

  size_t t = 0;
  while (t < r && t < m) {
    // Find the nonzero entry of least magnitude in the trailing block.
    size_t pi = t, pj = t;
    int64_t best = 0;
    for (size_t i = t; i < r; ++i)
      for (size_t j = t; j < m; ++j)
        if (A[i][j] != 0 && (best == 0 || std::llabs(A[i][j]) < best)) {
          best = std::llabs(A[i][j]);
          pi = i; pj = j;
        }
    if (best == 0) break;  // trailing block is zero
    swap_rows(A, out.U, t, pi);
    swap_cols(A, out.V, t, pj);

    // Knock down the pivot row/column; if any division leaves a remainder a
    // strictly smaller nonzero entry now exists, so reselect the pivot.
    bool progress = false;
    for (size_t i = t + 1; i < r; ++i)
      if (A[i][t] != 0) {
        row_op(A, out.U, i, t, A[i][t] / A[t][t]);
        if (A[i][t] != 0) progress = true;
      }
    for (size_t j = t + 1; j < m; ++j)
      if (A[t][j] != 0) {
        col_op(A, out.V, j, t, A[t][j] / A[t][t]);
        if (A[t][j] != 0) progress = true;
      }
    if (progress) continue;

    // Pivot now divides its row and column remainders are zero.  Enforce the
    // divisibility chain: if some interior entry is not divisible, fold its
    // column into column t and restart this pivot.
    bool redo = false;
    for (size_t i = t + 1; i < r && !redo; ++i)
      for (size_t j = t + 1; j < m && !redo; ++j)
        if (A[i][j] % A[t][t] != 0) {
          col_op(A, out.V, t, j, -1);  // col_t += col_j
          redo = true;
        }
    if (redo) continue;
    ++t;
  }

  for (size_t i = 0; i < t; ++i)
    if (A[i][i] < 0) {
      for (size_t j = 0; j < m; ++j) A[i][j] = -A[i][j];
      for (size_t j = 0; j < r; ++j) out.U[i][j] = -out.U[i][j];
    }

  out.rank = static_cast<int>(t);
  for (size_t i = 0; i < std::min(r, m); ++i) out.diag.push_back(i < t ? A[i][i] : 0);
  return out;
}

}  // namespace abw
