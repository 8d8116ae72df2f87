#include "abw/comb.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <stdexcept>

namespace abw {

namespace {

void require_inputs(const SetSystem& sys, const std::vector<int>& gamma) {
  if (sys.nx < 0 || sys.nx > 16)
    throw std::invalid_argument(
        "comb: the ground set must have at most 16 elements");
  if (sys.sets.empty())
    throw std::invalid_argument("comb: a set system needs at least one subset");
  const uint32_t full = (uint32_t(1) << sys.nx) - 1;
  for (uint32_t s : sys.sets)
    if (s & ~full)
      throw std::invalid_argument(
          "comb: a subset has elements outside the ground set");
  if (gamma.size() != sys.sets.size())
    throw std::invalid_argument("comb: gamma needs one entry per subset");
  for (int g : gamma)
    if (g < 0)
      throw std::invalid_argument("comb: gamma entries must be nonnegative");
}

// Backtracking over partial partitions realizing gamma.  f(blocks) is called
// once per complete realization and may return false to stop the
// enumeration; the return value is false iff some call stopped it.
template <class F>
bool for_each_partition(const SetSystem& sys, const std::vector<int>& gamma,
                        int j, uint32_t used, std::vector<uint32_t>& blocks,
                        F&& f) {
  if (j == sys.r()) return f(blocks);
  const uint32_t avail = sys.sets[j] & ~used;
  if (std::popcount(avail) < gamma[j]) return true;
  for (uint32_t s = avail;; s = (s - 1) & avail) {
    if (std::popcount(s) == gamma[j]) {
      blocks[j] = s;
      if (!for_each_partition(sys, gamma, j + 1, used | s, blocks, f))
        return false;
    }
    if (s == 0) break;
  }
  return true;
}

}  // namespace

bool is_admissible(const SetSystem& sys, const std::vector<int>& gamma) {
  require_inputs(sys, gamma);
  const int r = sys.r(), nx = sys.nx;
  int need = 0;
  for (int g : gamma) need += g;
  if (need == 0) return true;
  if (need > nx) return false;

  // Dense augmenting-path max flow on source -> blocks -> elements -> sink;
  // every node count involved is at most 16, so the matrix form is simplest.
  const int src = 0, snk = 1 + r + nx, nn = snk + 1;
  std::vector<std::vector<int>> cap(nn, std::vector<int>(nn, 0));
  for (int j = 0; j < r; ++j) {
    cap[src][1 + j] = gamma[j];
    for (int e = 0; e < nx; ++e)
      if (sys.sets[j] >> e & 1) cap[1 + j][1 + r + e] = 1;
  }
  for (int e = 0; e < nx; ++e) cap[1 + r + e][snk] = 1;

  int flow = 0;
  std::vector<int> prev(nn), queue;
  while (flow < need) {
    std::fill(prev.begin(), prev.end(), -1);
    prev[src] = src;
    queue.assign(1, src);
    for (size_t qi = 0; qi < queue.size() && prev[snk] < 0; ++qi) {
      const int u = queue[qi];
      for (int v = 0; v < nn; ++v)
        if (prev[v] < 0 && cap[u][v] > 0) {
          prev[v] = u;
          queue.push_back(v);
        }
    }
    if (prev[snk] < 0) return false;
    int aug = INT_MAX;
    for (int v = snk; v != src; v = prev[v])
      aug = std::min(aug, cap[prev[v]][v]);
    for (int v = snk; v != src; v = prev[v]) {
      cap[prev[v]][v] -= aug;
      cap[v][prev[v]] += aug;
    }
    flow += aug;
  }
  return true;
}

bool is_admissible_brute(const SetSystem& sys, const std::vector<int>& gamma) {
  require_inputs(sys, gamma);
  std::vector<uint32_t> blocks(sys.r(), 0);
  bool found = false;
  for_each_partition(sys, gamma, 0, 0, blocks, [&](const auto&) {
    found = true;
    return false;
  });
  return found;
}

std::vector<int> blocked_set(const SetSystem& sys,
                             const std::vector<int>& gamma) {
  if (!is_admissible(sys, gamma))
    throw std::domain_error(
        "blocked_set: gamma is not admissible for this set system");
  std::vector<int> blocked;
  std::vector<int> up = gamma;
  for (int j = 0; j < sys.r(); ++j) {
    up[j] += 1;
    if (!is_admissible(sys, up)) blocked.push_back(j);
    up[j] -= 1;
  }
  return blocked;
}

bool blocked_union_check(const SetSystem& sys, const std::vector<int>& gamma) {
  const std::vector<int> blocked = blocked_set(sys, gamma);
  uint32_t target = 0;
  for (int j : blocked) target |= sys.sets[j];

  bool ok = true;
  std::vector<uint32_t> blocks(sys.r(), 0);
  for_each_partition(sys, gamma, 0, 0, blocks, [&](const auto& bl) {
    uint32_t got = 0;
    for (int j : blocked) got |= bl[j];
    if (got != target) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

}  // namespace abw
