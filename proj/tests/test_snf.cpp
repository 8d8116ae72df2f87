#include <doctest.h>

#include "abw/snf.hpp"
#include "abw/types.hpp"

using namespace abw;

namespace {

using M = std::vector<std::vector<int64_t>>;

M matmul(const M& a, const M& b) {
  M c(a.size(), std::vector<int64_t>(b[0].size(), 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t k = 0; k < b.size(); ++k)
      for (size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

int64_t det3(const M& m) {  // up to 3x3, for unimodularity spot checks
  if (m.size() == 1) return m[0][0];
  if (m.size() == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

void check_snf(const M& a) {
  auto s = smith_normal_form(a);
  M uav = matmul(matmul(s.U, a), s.V);
  for (size_t i = 0; i < uav.size(); ++i)
    for (size_t j = 0; j < uav[0].size(); ++j) {
      int64_t want = (i == j && i < s.diag.size()) ? s.diag[i] : 0;
      CHECK(uav[i][j] == want);
    }
  for (size_t i = 0; i + 1 < s.diag.size(); ++i)
    if (s.diag[i + 1] != 0) {
      REQUIRE(s.diag[i] != 0);
      CHECK(s.diag[i + 1] % s.diag[i] == 0);
    }
  if (a.size() <= 3) CHECK(std::abs(det3(s.U)) == 1);
  if (a[0].size() <= 3) CHECK(std::abs(det3(s.V)) == 1);
}

}  // namespace

TEST_CASE("smith normal form: hand cases") {
  // 1x1
  check_snf({{4}});
  // classic 2x2 with nontrivial divisor chain
  auto s = smith_normal_form({{2, 4}, {6, 8}});
  CHECK(s.diag == std::vector<int64_t>{2, 4});
  // simple-walk difference lattice on Z: {2} as 1x1 from {-1,1} steps
  auto t = smith_normal_form({{2, -2}});
  CHECK(t.diag == std::vector<int64_t>{2});
  CHECK(t.rank == 1);
  // rank-deficient
  auto u = smith_normal_form({{1, 2}, {2, 4}});
  CHECK(u.diag == std::vector<int64_t>{1, 0});
  CHECK(u.rank == 1);
}

TEST_CASE("smith normal form: randomized UAV = D and divisibility") {
  Rng rng(20240817);
  for (int trial = 0; trial < 200; ++trial) {
    const int r = 1 + static_cast<int>(rng.uniform_int(0, 2));
    const int m = 1 + static_cast<int>(rng.uniform_int(0, 3));
    M a(r, std::vector<int64_t>(m));
    for (auto& row : a)
      for (auto& v : row) v = rng.uniform_int(-9, 9);
    check_snf(a);
  }
}

TEST_CASE("smith normal form: index of a finite-index sublattice") {
  // Columns span the even checkerboard sublattice of Z^2; index 2.
  auto s = smith_normal_form({{1, 1}, {1, -1}});
  int64_t index = 1;
  for (auto d : s.diag) index *= d;
  CHECK(index == 2);
}
