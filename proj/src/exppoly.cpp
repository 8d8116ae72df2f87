#include "abw/exppoly.hpp"

namespace abw {

void ExpPoly::add(const IKey& k, cplx c) {
  auto [it, fresh] = terms_.emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
  }
}

void ExpPoly::scale(cplx f) {
  for (auto& [k, c] : terms_) c *= f;
}

ExpPoly ExpPoly::mul(const ExpPoly& other) const {
  if (rank_ != other.rank_)
    throw std::invalid_argument("ExpPoly::mul: rank mismatch");
  ExpPoly out(rank_);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : other.terms_) out.add(key_add(ka, kb), ca * cb);
  return out;
}

ExpPoly ExpPoly::pow(int n) const {
  if (n < 0) throw std::invalid_argument("ExpPoly::pow: negative exponent");
  ExpPoly acc(rank_);
  acc.add(IKey{}, 1.0);
  ExpPoly base = *this;
  while (n) {
    if (n & 1) acc = acc.mul(base);
    n >>= 1;
    if (n) base = base.mul(base);
  }
  return acc;
}

void ExpPoly::truncate(double rel_tol) {
  const double cut = rel_tol * max_abs_coeff();
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= cut)
      it = terms_.erase(it);
    else
      ++it;
  }
}

double ExpPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::array<int32_t, kMaxRank> ExpPoly::key_min() const {
  std::array<int32_t, kMaxRank> lo{};
  bool first = true;
  for (const auto& [k, c] : terms_) {
    for (int i = 0; i < kMaxRank; ++i) lo[i] = first ? k[i] : std::min(lo[i], k[i]);
    first = false;
  }
  return lo;
}

std::array<int32_t, kMaxRank> ExpPoly::key_max() const {
  std::array<int32_t, kMaxRank> hi{};
  bool first = true;
  for (const auto& [k, c] : terms_) {
    for (int i = 0; i < kMaxRank; ++i) hi[i] = first ? k[i] : std::max(hi[i], k[i]);
    first = false;
  }
  return hi;
}

std::array<int32_t, kMaxRank> ExpPoly::key_span() const {
  auto lo = key_min(), hi = key_max();
  std::array<int32_t, kMaxRank> span{};
  if (!terms_.empty())
    for (int i = 0; i < kMaxRank; ++i) span[i] = hi[i] - lo[i];
  return span;
}

cplx ExpPoly::eval_dual(const CVec& w) const {
  if (w.size() != rank_)
    throw std::invalid_argument("ExpPoly::eval_dual: argument rank mismatch");
  cplx total = 0.0;
  for (const auto& [k, c] : terms_) {
    cplx e = 0.0;
    for (int i = 0; i < rank_; ++i) e += double(k[i]) * w[i];
    total += c * std::exp(e);
  }
  return total;
}

}  // namespace abw
