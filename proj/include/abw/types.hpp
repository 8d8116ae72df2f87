#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace abw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

// Integer coordinate vector in some fixed lattice basis.  Rank is carried by
// the owning object; keys are zero-padded to kMaxRank so they can act as
// ordered map keys without a separate comparator.
constexpr int kMaxRank = 8;
using IKey = std::array<int32_t, kMaxRank>;

inline IKey make_key(const std::vector<int32_t>& v) {
  if (v.size() > static_cast<size_t>(kMaxRank))
    throw std::invalid_argument("lattice key rank exceeds " + std::to_string(kMaxRank));
  IKey k{};
  for (size_t i = 0; i < v.size(); ++i) k[i] = v[i];
  return k;
}

inline IKey key_add(const IKey& a, const IKey& b) {
  IKey r{};
  for (int i = 0; i < kMaxRank; ++i) r[i] = a[i] + b[i];
  return r;
}

inline IKey key_sub(const IKey& a, const IKey& b) {
  IKey r{};
  for (int i = 0; i < kMaxRank; ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec key_to_vec(const IKey& k, int rank) {
  Vec v(rank);
  for (int i = 0; i < rank; ++i) v[i] = k[i];
  return v;
}

// Deterministic uniform doubles.  mt19937_64 output is pinned by the standard,
// and mapping the top 53 bits through ldexp avoids the implementation-defined
// behavior of std::uniform_real_distribution, so seeded runs agree everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform() { return std::ldexp(static_cast<double>(eng_() >> 11), -53); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int64_t uniform_int(int64_t lo, int64_t hi) {  // inclusive bounds
    return lo + static_cast<int64_t>(uniform() * static_cast<double>(hi - lo + 1));
  }
  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace abw
