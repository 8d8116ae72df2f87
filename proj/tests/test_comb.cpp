#include <doctest.h>

#include "abw/comb.hpp"

#include <bit>
#include <random>
#include <stdexcept>
#include <vector>

using namespace abw;

namespace {

// every multi-index with r entries and sum at most cap
std::vector<std::vector<int>> all_gammas(int r, int cap) {
  std::vector<std::vector<int>> out;
  std::vector<int> g(r, 0);
  while (true) {
    int sum = 0;
    for (int v : g) sum += v;
    if (sum <= cap) out.push_back(g);
    int j = r - 1;
    while (j >= 0 && g[j] == cap) g[j--] = 0;
    if (j < 0) break;
    ++g[j];
  }
  return out;
}

void check_system(const SetSystem& sys, const std::vector<int>& gamma) {
  const bool flow = is_admissible(sys, gamma);
  const bool brute = is_admissible_brute(sys, gamma);
  REQUIRE(flow == brute);
  if (!flow) return;
  // dropping one element from a realized block keeps gamma admissible
  std::vector<int> down = gamma;
  for (int j = 0; j < sys.r(); ++j) {
    if (gamma[j] == 0) continue;
    down[j] -= 1;
    REQUIRE(is_admissible(sys, down));
    down[j] += 1;
  }
  REQUIRE(blocked_union_check(sys, gamma));
}

}  // namespace

TEST_CASE("worked two-element example") {
  // ground set {a, b}; C1 = {a}, C2 = {a, b}
  const SetSystem sys{2, {0b01u, 0b11u}};

  CHECK(is_admissible(sys, {1, 1}));
  CHECK(is_admissible_brute(sys, {1, 1}));
  CHECK(!is_admissible(sys, {2, 0}));  // C1 has only one element
  CHECK(is_admissible(sys, {0, 0}));   // the empty partition

  // from (1,1) both directions are blocked: (2,1) exceeds C1 and (1,2)
  // exceeds the ground set
  CHECK(blocked_set(sys, {1, 1}) == std::vector<int>{0, 1});
  // from (0,0) nothing is blocked since every C_j is nonempty
  CHECK(blocked_set(sys, {0, 0}).empty());

  CHECK(blocked_union_check(sys, {1, 1}));
  CHECK(blocked_union_check(sys, {0, 0}));
}

TEST_CASE("an empty subset is blocked from every admissible gamma") {
  const SetSystem sys{2, {0b00u, 0b11u}};
  for (int g2 : {0, 1, 2}) {
    const auto blocked = blocked_set(sys, {0, g2});
    REQUIRE(!blocked.empty());
    CHECK(blocked.front() == 0);
  }
  CHECK(!is_admissible(sys, {1, 0}));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(is_admissible(SetSystem{2, {}}, {}), std::invalid_argument);
  CHECK_THROWS_AS(is_admissible(SetSystem{17, {1u}}, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_admissible(SetSystem{2, {0b100u}}, {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_admissible(SetSystem{2, {0b01u}}, {0, 0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(is_admissible(SetSystem{2, {0b01u}}, {-1}),
                  std::invalid_argument);
  // the blocked set is defined only from an admissible gamma
  CHECK_THROWS_AS(blocked_set(SetSystem{2, {0b01u, 0b11u}}, {2, 0}),
                  std::domain_error);
  CHECK_THROWS_AS(blocked_union_check(SetSystem{2, {0b01u, 0b11u}}, {2, 0}),
                  std::domain_error);
}

TEST_CASE("exhaustive agreement on all small systems") {
  // every system with up to 3 ground elements and up to 2 subsets, every
  // gamma with sum at most nx + 1 (one past the admissible range)
  for (int nx = 1; nx <= 3; ++nx) {
    const uint32_t full = (1u << nx) - 1;
    for (uint32_t c1 = 0; c1 <= full; ++c1) {
      for (uint32_t c2 = 0; c2 <= full; ++c2) {
        const SetSystem sys{nx, {c1, c2}};
        for (const auto& g : all_gammas(2, nx + 1)) check_system(sys, g);
      }
      const SetSystem one{nx, {c1}};
      for (const auto& g : all_gammas(1, nx + 1)) check_system(one, g);
    }
  }
}

TEST_CASE("random systems: flow oracle and the blocked union identity") {
  std::mt19937 rng(0xC0FFEE);
  for (int trial = 0; trial < 500; ++trial) {
    std::uniform_int_distribution<int> nx_d(1, 6), r_d(1, 4);
    const int nx = nx_d(rng), r = r_d(rng);
    std::uniform_int_distribution<uint32_t> mask_d(0, (1u << nx) - 1);
    SetSystem sys{nx, {}};
    for (int j = 0; j < r; ++j) sys.sets.push_back(mask_d(rng));
    for (const auto& g : all_gammas(r, nx + 1)) check_system(sys, g);
  }
}
