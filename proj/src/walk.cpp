#include "abw/walk.hpp"

#include "abw/snf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace abw {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Integer key of a step vector in the kernel's lattice basis.
IKey step_key(const WalkSpec& spec, const Vec& mu, int rank) {
  std::vector<int32_t> c(rank);
  if (spec.flavor == Flavor::building) {
    const auto cc = spec.ctx->rs.coweight_coords(mu, 1e-9);
    for (int i = 0; i < rank; ++i) c[i] = cc[i];
  } else {
    for (int i = 0; i < rank; ++i) {
      c[i] = static_cast<int32_t>(std::lround(mu[i]));
      if (std::abs(mu[i] - c[i]) > 1e-9)
        throw std::invalid_argument("lattice-flavor step is not an integer vector");
    }
  }
  return make_key(c);
}

// Facets of conv(points) by enumerating r-element subsets and keeping the
// hyperplanes with every point on one side.  Exact normals at desk scale,
// no geometry dependency.
std::vector<Facet> hull_facets(const std::vector<Vec>& pts, int r) {
  const int n = static_cast<int>(pts.size());
  double scale = 1e-12;
  for (const Vec& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
  const double tol = 1e-9 * scale;

  std::vector<Facet> out;
  std::set<std::vector<int64_t>> seen;  // quantized (normal, offset)
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    // candidate hyperplane through pts[idx]
    Mat diffs(std::max(r - 1, 0), r);
    for (int i = 1; i < r; ++i) diffs.row(i - 1) = (pts[idx[i]] - pts[idx[0]]).transpose();
    Eigen::FullPivLU<Mat> lu(diffs);
    lu.setThreshold(1e-9);
    if (r == 1 || lu.dimensionOfKernel() == 1) {
      Vec nrm = r == 1 ? Vec::Ones(1) : Vec(lu.kernel().col(0));
      nrm /= nrm.norm();
      const double off = nrm.dot(pts[idx[0]]);
      bool above = false, below = false;
      for (const Vec& p : pts) {
        const double s = nrm.dot(p) - off;
        above = above || s > tol;
        below = below || s < -tol;
      }
      if (!above || !below) {
        Facet f{above ? -nrm : nrm, 0.0};
        f.offset = f.normal.dot(pts[idx[0]]);
        std::vector<int64_t> key(r + 1);
        for (int i = 0; i < r; ++i) key[i] = std::llround(f.normal[i] * 1e7);
        key[r] = std::llround(f.offset * 1e7);
        if (seen.insert(key).second) out.push_back(std::move(f));
      }
    }
    // next r-subset
    int pos = r - 1;
    while (pos >= 0 && idx[pos] == n - r + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < r; ++i) idx[i] = idx[i - 1] + 1;
  }
  return out;
}

}  // namespace

cplx Kernel::kappa_eval(const CVec& z) const {
  return kappa.eval_dual(basis.transpose() * z);
}

cplx Kernel::kappa_itheta(const Vec& theta) const {
  CVec z(rank);
  for (int i = 0; i < rank; ++i) z[i] = cplx(0.0, theta[i]);
  return kappa_eval(z);
}

double Kernel::log_kappa(const Vec& s) const {
  // log sum c_v e^{<s,v>}, shifted by the max exponent for range safety
  double emax = -1e300;
  for (size_t i = 0; i < support_vec.size(); ++i)
    emax = std::max(emax, s.dot(support_vec[i]));
  double acc = 0.0;
  for (size_t i = 0; i < support_vec.size(); ++i)
    acc += cv[i] * std::exp(s.dot(support_vec[i]) - emax);
  return emax + std::log(acc);
}

Kernel build_kernel(const WalkSpec& spec) {
  Kernel k;
  k.flavor = spec.flavor;
  if (spec.flavor == Flavor::building) {
    if (!spec.ctx) throw std::invalid_argument("building-flavor walk needs a context");
    k.ctx = spec.ctx;
    k.rank = spec.ctx->rank();
    k.basis = spec.ctx->rs.fund_coweight;
  } else {
    if (spec.rank < 1 || spec.rank > kMaxRank)
      throw std::invalid_argument("lattice-flavor walk rank out of range");
    k.rank = spec.rank;
    k.basis = Mat::Identity(spec.rank, spec.rank);
  }

  if (spec.steps.empty()) throw std::invalid_argument("walk has no steps");
  double mass = 0.0;
  std::set<IKey> distinct;
  for (const auto& st : spec.steps) {
    if (!(st.a > 0.0))
      throw std::invalid_argument("step probabilities must be strictly positive");
    if (st.mu.size() != k.rank)
      throw std::invalid_argument("step vector rank mismatch");
    if (spec.flavor == Flavor::building && !spec.ctx->rs.is_dominant(st.mu, 1e-9))
      throw std::invalid_argument("building-flavor steps must be dominant coweights");
    if (!distinct.insert(step_key(spec, st.mu, k.rank)).second)
      throw std::invalid_argument("duplicate step in walk specification");
    mass += st.a;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("step probabilities must sum to 1");

  // Transform of the step distribution, and its value at the origin.
  k.ahat = ExpPoly(k.rank);
  double rho0 = 0.0;
  for (const auto& st : spec.steps) {
    const double a = st.a / mass;
    if (spec.flavor == Flavor::building) {
      const ExpPoly p = macdonald_exp_poly(*spec.ctx, st.mu);
      for (const auto& [key, c] : p.terms()) k.ahat.add(key, a * c);
      rho0 += a * macdonald_at_zero(*spec.ctx, st.mu).value.real();
    } else {
      k.ahat.add(step_key(spec, st.mu, k.rank), a);
      rho0 += a;
    }
  }
  // Cross-check the limit-mode value against the plain coefficient mass; the
  // two routes agree to extraction accuracy or the transform is broken.
  cplx csum(0, 0);
  for (const auto& [key, c] : k.ahat.terms()) csum += c;
  if (std::abs(csum - cplx(rho0, 0)) > 1e-8 * std::abs(rho0))
    throw std::runtime_error(
        "transform mass and limit evaluation at the origin disagree");
  k.rho = rho0;

  k.kappa = k.ahat;
  k.kappa.scale(1.0 / k.rho);
  const double cmax = k.kappa.max_abs_coeff();
  for (const auto& [key, c] : k.kappa.terms()) {
    if (!(c.real() > 1e-12) || std::abs(c.imag()) > 1e-10 * cmax)
      throw std::runtime_error(
          "normalized kernel coefficient is not strictly positive; isotropic "
          "step averages must put positive weight on every support point");
    k.support.push_back(key);
    k.support_vec.push_back(k.basis * key_to_vec(key, k.rank));
    k.cv.push_back(c.real());
    k.max_step_norm = std::max(k.max_step_norm, k.support_vec.back().norm());
  }

  // Irreducibility: support differences must span with finite lattice index.
  if (k.support.size() < 2)
    throw std::invalid_argument("walk is reducible: single-point support");
  k.base_key = k.support[0];
  std::vector<std::vector<int64_t>> diff(k.rank);
  for (size_t j = 1; j < k.support.size(); ++j)
    for (int i = 0; i < k.rank; ++i)
      diff[i].push_back(k.support[j][i] - k.base_key[i]);
  const SmithResult sr = smith_normal_form(diff);
  if (sr.rank < k.rank)
    throw std::invalid_argument(
        "walk is reducible: support differences do not span the lattice");
  k.snf_u = sr.U;
  k.snf_d.assign(sr.diag.begin(), sr.diag.begin() + k.rank);

  k.facets = hull_facets(k.support_vec, k.rank);

  auto [cnt, pts] = periodicity_set(k);
  k.u_count = cnt;
  k.u_points = std::move(pts);
  return k;
}

std::pair<long long, std::vector<Vec>> periodicity_set(const Kernel& k) {
  long long count = 1;
  for (int64_t d : k.snf_d) count *= d;

  // In key-dual coordinates y = basis^T theta the condition is
  // d_i * (U^{-T} y)_i in 2 pi Z, so representatives are y = U^T t with
  // t_i = 2 pi m_i / d_i; back to ambient theta by solving basis^T theta = y.
  Mat ut(k.rank, k.rank);
  for (int i = 0; i < k.rank; ++i)
    for (int j = 0; j < k.rank; ++j) ut(i, j) = static_cast<double>(k.snf_u[j][i]);
  Eigen::ColPivHouseholderQR<Mat> solver(k.basis.transpose());

  std::vector<Vec> pts;
  std::vector<int64_t> m(k.rank, 0);
  while (true) {
    Vec t(k.rank);
    for (int i = 0; i < k.rank; ++i) t[i] = kTwoPi * double(m[i]) / double(k.snf_d[i]);
    const Vec theta = solver.solve(ut * t);
    for (size_t j = 0; j < k.support_vec.size(); ++j) {
      const double ph = theta.dot(k.support_vec[j] - k.support_vec[0]) / kTwoPi;
      if (std::abs(ph - std::round(ph)) > 1e-12)
        throw std::runtime_error("periodicity representative fails the phase check");
    }
    pts.push_back(theta);
    int ax = k.rank - 1;
    while (ax >= 0 && m[ax] == k.snf_d[ax] - 1) { m[ax] = 0; --ax; }
    if (ax < 0) break;
    ++m[ax];
  }
  if (static_cast<long long>(pts.size()) != count)
    throw std::logic_error("periodicity point count mismatch");
  return {count, std::move(pts)};
}

double dist_to_boundary(const Kernel& k, const Vec& delta) {
  double d = 1e300;
  for (const Facet& f : k.facets) d = std::min(d, f.offset - f.normal.dot(delta));
  return d;
}

bool support_residue_ok(const Kernel& k, const IKey& key, int64_t n) {
  for (int i = 0; i < k.rank; ++i) {
    int64_t c = 0;
    for (int j = 0; j < k.rank; ++j)
      c += k.snf_u[i][j] * (int64_t(key[j]) - n * int64_t(k.base_key[j]));
    if (c % k.snf_d[i] != 0) return false;
  }
  return true;
}

}  // namespace abw
