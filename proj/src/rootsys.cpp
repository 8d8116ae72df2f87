#include "abw/rootsys.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace abw {
namespace {

// Simple roots in the classical ambient coordinates (Bourbaki tables).
// Columns are the roots; the ambient dimension may exceed the rank (A_r sits
// in the sum-zero hyperplane of R^{r+1}, E6/E7 inside R^8).
Mat ambient_simple_roots(RootKind kind, int r) {
  auto basis = [](int m, int i) { Vec e = Vec::Zero(m); e[i] = 1.0; return e; };
  Mat S;
  switch (kind) {
    case RootKind::A: {
      const int m = r + 1;
      S.setZero(m, r);
      for (int i = 0; i < r; ++i) S.col(i) = basis(m, i) - basis(m, i + 1);
      break;
    }
    case RootKind::B: {
      S.setZero(r, r);
      for (int i = 0; i + 1 < r; ++i) S.col(i) = basis(r, i) - basis(r, i + 1);
      S.col(r - 1) = basis(r, r - 1);
      break;
    }
    case RootKind::C: {
      S.setZero(r, r);
      for (int i = 0; i + 1 < r; ++i) S.col(i) = basis(r, i) - basis(r, i + 1);
      S.col(r - 1) = 2.0 * basis(r, r - 1);
      break;
    }
    case RootKind::D: {
      S.setZero(r, r);
      for (int i = 0; i + 1 < r; ++i) S.col(i) = basis(r, i) - basis(r, i + 1);
      S.col(r - 1) = basis(r, r - 2) + basis(r, r - 1);
      break;
    }
    case RootKind::E: {
      S.setZero(8, r);
      Vec a1 = Vec::Zero(8);
      a1[0] = 0.5;
      a1[7] = 0.5;
      for (int i = 1; i <= 6; ++i) a1[i] = -0.5;
      S.col(0) = a1;
      S.col(1) = basis(8, 0) + basis(8, 1);
      for (int i = 2; i < r; ++i) S.col(i) = basis(8, i - 1) - basis(8, i - 2);
      break;
    }
    case RootKind::F: {
      S.setZero(4, 4);
      S.col(0) = basis(4, 1) - basis(4, 2);
      S.col(1) = basis(4, 2) - basis(4, 3);
      S.col(2) = basis(4, 3);
      S.col(3) = 0.5 * (basis(4, 0) - basis(4, 1) - basis(4, 2) - basis(4, 3));
      break;
    }
    case RootKind::G: {
      S.setZero(3, 2);
      S.col(0) = basis(3, 0) - basis(3, 1);
      S.col(1) = -2.0 * basis(3, 0) + basis(3, 1) + basis(3, 2);
      break;
    }
  }
  return S;
}

void validate_pair(RootKind kind, int r) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("root system (" + to_string(kind) + ", " +
                                std::to_string(r) + ") rejected: " + why);
  };
  switch (kind) {
    case RootKind::A: if (r < 1) fail("rank must be >= 1"); break;
    case RootKind::B: if (r < 2) fail("rank must be >= 2 (B_1 = A_1)"); break;
    case RootKind::C: if (r < 2) fail("rank must be >= 2 (C_1 = A_1)"); break;
    case RootKind::D: if (r < 4) fail("rank must be >= 4 (D_3 = A_3)"); break;
    case RootKind::E: if (r < 6 || r > 8) fail("rank must be 6, 7 or 8"); break;
    case RootKind::F: if (r != 4) fail("rank must be 4"); break;
    case RootKind::G: if (r != 2) fail("rank must be 2"); break;
  }
  if (r > kMaxRank) fail("rank exceeds supported maximum " + std::to_string(kMaxRank));
}

std::vector<int> simple_coords(const Mat& simple_inv, const Vec& root) {
  Vec c = simple_inv * root;
  std::vector<int> out(c.size());
  for (int i = 0; i < c.size(); ++i) {
    out[i] = static_cast<int>(std::lround(c[i]));
    if (std::abs(c[i] - out[i]) > 1e-8)
      throw std::logic_error("root closure produced non-integral coordinates");
  }
  return out;
}

}  // namespace

RootKind root_kind_from_string(const std::string& s) {
  if (s.size() == 1) {
    switch (s[0]) {
      case 'A': return RootKind::A;
      case 'B': return RootKind::B;
      case 'C': return RootKind::C;
      case 'D': return RootKind::D;
      case 'E': return RootKind::E;
      case 'F': return RootKind::F;
      case 'G': return RootKind::G;
      default: break;
    }
  }
  throw std::invalid_argument("unknown root system kind '" + s + "' (expect A..G)");
}

std::string to_string(RootKind k) {
  switch (k) {
    case RootKind::A: return "A";
    case RootKind::B: return "B";
    case RootKind::C: return "C";
    case RootKind::D: return "D";
    case RootKind::E: return "E";
    case RootKind::F: return "F";
    case RootKind::G: return "G";
  }
  return "?";
}

RootSystem build_root_system(RootKind kind, int rank) {
  validate_pair(kind, rank);
  RootSystem rs;
  rs.kind = kind;
  rs.rank = rank;

  // Re-express the ambient realization in an orthonormal basis of its span so
  // the standard dot product is the root-space inner product from here on.
  const Mat amb = ambient_simple_roots(kind, rank);
  Eigen::HouseholderQR<Mat> qr(amb);
  Mat Q = qr.householderQ() * Mat::Identity(amb.rows(), rank);
  rs.simple = Q.transpose() * amb;

  const Mat simple_inv = rs.simple.inverse();

  // Closure of the simple roots under simple reflections reaches every root.
  // Dedup by the integral coordinates in the simple-root basis.
  std::map<std::vector<int>, Vec> roots;
  std::deque<Vec> frontier;
  for (int i = 0; i < rank; ++i) {
    roots.emplace(simple_coords(simple_inv, rs.simple.col(i)), rs.simple.col(i));
    frontier.push_back(rs.simple.col(i));
  }
  while (!frontier.empty()) {
    Vec b = frontier.front();
    frontier.pop_front();
    for (int i = 0; i < rank; ++i) {
      const Vec a = rs.simple.col(i);
      Vec img = b - (2.0 * a.dot(b) / a.dot(a)) * a;
      auto key = simple_coords(simple_inv, img);
      if (roots.emplace(key, img).second) frontier.push_back(img);
    }
  }

  // Positive roots: all simple-basis coordinates share one sign; keep the
  // nonnegative ones, simple roots first, then by height and coordinates.
  std::vector<std::pair<std::vector<int>, Vec>> pos;
  for (auto& [key, v] : roots) {
    bool nonneg = std::all_of(key.begin(), key.end(), [](int c) { return c >= 0; });
    if (nonneg) pos.emplace_back(key, v);
  }
  std::sort(pos.begin(), pos.end(), [](const auto& x, const auto& y) {
    int hx = std::accumulate(x.first.begin(), x.first.end(), 0);
    int hy = std::accumulate(y.first.begin(), y.first.end(), 0);
    if (hx != hy) return hx < hy;
    return x.first < y.first;
  });

  const int np = static_cast<int>(pos.size());
  rs.positive.resize(rank, np);
  rs.copositive.resize(rank, np);
  for (int j = 0; j < np; ++j) {
    rs.positive.col(j) = pos[j].second;
    rs.copositive.col(j) = 2.0 * pos[j].second / pos[j].second.squaredNorm();
    rs.pos_in_simple.push_back(pos[j].first);
  }

  rs.cosimple.resize(rank, rank);
  for (int i = 0; i < rank; ++i)
    rs.cosimple.col(i) = 2.0 * rs.simple.col(i) / rs.simple.col(i).squaredNorm();

  rs.highest_root = pos.back().second;
  rs.marks = pos.back().first;

  rs.fund_coweight = rs.simple.transpose().inverse();
  rs.rho_coweight = rs.fund_coweight.rowwise().sum();

  // Length classes.  Distinct squared lengths, ordered by first appearance
  // among the simple roots; for irreducible systems this matches reflection
  // conjugacy.
  std::vector<double> lengths;
  auto class_of = [&](double n2) {
    for (size_t c = 0; c < lengths.size(); ++c)
      if (std::abs(lengths[c] - n2) < 1e-9) return static_cast<int>(c);
    lengths.push_back(n2);
    return static_cast<int>(lengths.size() - 1);
  };
  for (int i = 0; i < rank; ++i)
    rs.simple_class.push_back(class_of(rs.simple.col(i).squaredNorm()));
  for (int j = 0; j < np; ++j)
    rs.positive_class.push_back(class_of(rs.positive.col(j).squaredNorm()));
  rs.num_classes = static_cast<int>(lengths.size());

  return rs;
}

int64_t weyl_order(RootKind kind, int rank) {
  auto fact = [](int n) {
    int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  switch (kind) {
    case RootKind::A: return fact(rank + 1);
    case RootKind::B:
    case RootKind::C: return (int64_t(1) << rank) * fact(rank);
    case RootKind::D: return (int64_t(1) << (rank - 1)) * fact(rank);
    case RootKind::E:
      return rank == 6 ? 51840 : (rank == 7 ? 2903040 : 696729600);
    case RootKind::F: return 1152;
    case RootKind::G: return 12;
  }
  return 0;
}

WeylGroup weyl_group(const RootSystem& rs, int64_t max_order) {
  const int64_t expect = weyl_order(rs.kind, rs.rank);
  if (expect > max_order)
    throw std::invalid_argument(
        "weyl_group: explicit enumeration of " + to_string(rs.kind) + "_" +
        std::to_string(rs.rank) + " refused, order " + std::to_string(expect) +
        " exceeds cap " + std::to_string(max_order));

  const int r = rs.rank;
  std::vector<Mat> gen(r);
  for (int i = 0; i < r; ++i)
    gen[i] = Mat::Identity(r, r) -
             rs.simple.col(i) * rs.cosimple.col(i).transpose();

  // Breadth-first closure.  w is pinned down by its action on the (regular)
  // coweight rho, whose image has integral coweight coordinates, so the dedup
  // key is exact.
  WeylGroup wg;
  std::map<std::vector<int>, int> seen;
  auto key_of = [&](const Mat& w) {
    return rs.coweight_coords(w * rs.rho_coweight, 1e-6);
  };
  wg.elements.push_back(Mat::Identity(r, r));
  wg.length.push_back(0);
  wg.word.push_back({});
  seen.emplace(key_of(wg.elements[0]), 0);

  for (size_t head = 0; head < wg.elements.size(); ++head) {
    const Mat w = wg.elements[head];  // copy: vector may reallocate below
    for (int i = 0; i < r; ++i) {
      Mat next = gen[i] * w;  // left multiplication; word grows on the left
      auto key = key_of(next);
      if (seen.emplace(key, static_cast<int>(wg.elements.size())).second) {
        wg.elements.push_back(std::move(next));
        wg.length.push_back(wg.length[head] + 1);
        auto word = wg.word[head];
        word.insert(word.begin(), i);
        wg.word.push_back(std::move(word));
      }
    }
  }

  if (wg.order() != expect)
    throw std::logic_error("weyl_group: enumeration found " +
                           std::to_string(wg.order()) + " elements, expected " +
                           std::to_string(expect));
  return wg;
}

QParams make_q_params(const RootSystem& rs, const std::vector<double>& q_per_simple) {
  if (static_cast<int>(q_per_simple.size()) != rs.rank)
    throw std::invalid_argument("make_q_params: need one q per simple root (" +
                                std::to_string(rs.rank) + ")");
  QParams qp;
  qp.by_class.assign(rs.num_classes, 0.0);
  std::vector<bool> set(rs.num_classes, false);
  for (int i = 0; i < rs.rank; ++i) {
    const double q = q_per_simple[i];
    if (!(q > 1.0))
      throw std::invalid_argument("make_q_params: q must exceed 1 (node " +
                                  std::to_string(i) + " has " + std::to_string(q) + ")");
    const int c = rs.simple_class[i];
    if (set[c] && qp.by_class[c] != q)
      throw std::invalid_argument(
          "make_q_params: nodes with conjugate reflections must share q "
          "(node " + std::to_string(i) + " conflicts)");
    qp.by_class[c] = q;
    set[c] = true;
  }
  return qp;
}

double poincare_q_inverse(const RootSystem& rs, const WeylGroup& wg, const QParams& q) {
  double total = 0.0;
  for (const auto& word : wg.word) {
    double t = 1.0;
    for (int i : word) t /= q.by_class[rs.simple_class[i]];
    total += t;
  }
  return total;
}

double log_q_halfsum(const RootSystem& rs, const QParams& q, const Vec& v) {
  double s = 0.0;
  for (int j = 0; j < rs.num_positive(); ++j)
    s += std::log(q.for_positive(rs, j)) * 0.5 * rs.positive.col(j).dot(v);
  return s;
}

std::vector<int> RootSystem::coweight_coords(const Vec& v, double tol) const {
  std::vector<int> out(rank);
  for (int i = 0; i < rank; ++i) {
    const double c = simple.col(i).dot(v);
    out[i] = static_cast<int>(std::lround(c));
    if (std::abs(c - out[i]) > tol)
      throw std::invalid_argument("coweight_coords: vector is not a lattice point "
                                  "(coordinate " + std::to_string(c) + ")");
  }
  return out;
}

Vec RootSystem::coweight_point(const std::vector<int>& coords) const {
  if (static_cast<int>(coords.size()) != rank)
    throw std::invalid_argument("coweight_point: coordinate count != rank");
  Vec v = Vec::Zero(rank);
  for (int i = 0; i < rank; ++i) v += coords[i] * fund_coweight.col(i);
  return v;
}

bool RootSystem::is_dominant(const Vec& v, double tol) const {
  for (int i = 0; i < rank; ++i)
    if (cosimple.col(i).dot(v) < -tol) return false;
  return true;
}

Vec to_dominant(const RootSystem& rs, const Vec& v) {
  Vec x = v;
  // Repeatedly reflect through a violated wall; terminates since the height
  // <rho-dual, x> strictly increases.  Cap guards against tolerance loops.
  for (int guard = 0; guard < 100000; ++guard) {
    int worst = -1;
    double worst_val = -1e-13;
    for (int i = 0; i < rs.rank; ++i) {
      const double c = rs.cosimple.col(i).dot(x);
      if (c < worst_val) { worst_val = c; worst = i; }
    }
    if (worst < 0) return x;
    x -= rs.cosimple.col(worst).dot(x) * rs.simple.col(worst);
  }
  throw std::logic_error("to_dominant: did not converge");
}

}  // namespace abw
