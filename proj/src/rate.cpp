#include "abw/rate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace abw {
namespace {

// Step weights w_v = c_v e^{<x,v>} / kappa(x), max-shifted for range safety.
std::vector<double> step_weights(const Kernel& k, const Vec& x) {
  const size_t n = k.support_vec.size();
  std::vector<double> w(n);
  double emax = -1e300;
  for (size_t i = 0; i < n; ++i) emax = std::max(emax, x.dot(k.support_vec[i]));
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    w[i] = k.cv[i] * std::exp(x.dot(k.support_vec[i]) - emax);
    sum += w[i];
  }
  for (double& wi : w) wi /= sum;
  return w;
}

Vec grad_log_kappa(const Kernel& k, const Vec& x) {
  const auto w = step_weights(k, x);
  Vec g = Vec::Zero(k.rank);
  for (size_t i = 0; i < k.support_vec.size(); ++i) g += w[i] * k.support_vec[i];
  return g;
}

// Gauss-Legendre nodes and weights on [0,1].
void gl_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = 0.5 * (1.0 + t);
    w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

// Directional cumulants m_k = sum w_v <theta,v>^k with complex weights at
// z = x + it theta, giving D_theta^2 and D_theta^3 of log kappa there.
struct DirCumulants {
  cplx d2, d3;
};
DirCumulants dir_cumulants(const Kernel& k, const Vec& x, const Vec& theta, double t) {
  const size_t n = k.support_vec.size();
  double emax = -1e300;
  for (size_t i = 0; i < n; ++i) emax = std::max(emax, x.dot(k.support_vec[i]));
  cplx sum(0, 0), m1(0, 0), m2(0, 0), m3(0, 0);
  for (size_t i = 0; i < n; ++i) {
    const double p = theta.dot(k.support_vec[i]);
    const cplx wv = k.cv[i] * std::exp(x.dot(k.support_vec[i]) - emax) *
                    std::exp(cplx(0.0, t * p));
    sum += wv;
    m1 += wv * p;
    m2 += wv * p * p;
    m3 += wv * p * p * p;
  }
  m1 /= sum;
  m2 /= sum;
  m3 /= sum;
  return {m2 - m1 * m1, m3 - 3.0 * m2 * m1 + 2.0 * m1 * m1 * m1};
}

void check_strip(const Kernel& k, const Vec& theta) {
  const double lim = 1.0 / (4.0 * k.max_step_norm);
  if (theta.norm() >= lim)
    throw std::domain_error(
        "variance integral argument outside the validity strip ||theta|| < " +
        std::to_string(lim));
}

// Worst-case inequality data for one velocity: min over support of
// e^{<s,v>}/kappa(s), paired with the boundary distance.
struct FitPoint {
  double ratio;
  double dist;
};
std::vector<FitPoint> fit_points(const Kernel& k, const std::vector<Vec>& grid) {
  std::vector<FitPoint> out;
  out.reserve(grid.size());
  for (const Vec& d : grid) {
    const Saddle sp = saddle(k, d);
    const double lk = k.log_kappa(sp.s);
    double tmin = 1e300;
    for (const Vec& v : k.support_vec)
      tmin = std::min(tmin, std::exp(sp.s.dot(v) - lk));
    out.push_back({tmin, sp.dist});
  }
  return out;
}

// Geometric ladder of velocities approaching the boundary along rays from the
// support centroid toward every facet centroid and every hull vertex.  Rung j
// sits at parameter 1 - 2^{-(j+joff)}.  A uniform grid never gets near the
// boundary, and on interior points alone every exponent candidate looks fine;
// the deep rungs are what separate them.
std::vector<Vec> boundary_ladder(const Kernel& k, int jmax, double joff) {
  const double diam = hull_diameter(k);
  Vec c0 = Vec::Zero(k.rank);
  for (const Vec& v : k.support_vec) c0 += v;
  c0 /= static_cast<double>(k.support_vec.size());

  std::vector<Vec> targets;
  std::set<std::vector<int64_t>> seen;
  auto push = [&](const Vec& p) {
    std::vector<int64_t> key(k.rank);
    for (int i = 0; i < k.rank; ++i) key[i] = llround(p[i] * 1e7);
    if (seen.insert(key).second) targets.push_back(p);
  };
  for (const Facet& f : k.facets) {
    Vec fc = Vec::Zero(k.rank);
    int cnt = 0;
    for (const Vec& v : k.support_vec)
      if (std::abs(f.normal.dot(v) - f.offset) <=
          1e-9 * (1.0 + std::abs(f.offset))) {
        push(v);
        fc += v;
        ++cnt;
      }
    if (cnt > 0) push(Vec(fc / cnt));
  }

  std::vector<Vec> out;
  for (const Vec& p : targets)
    for (int j = 1; j <= jmax; ++j) {
      const Vec d = c0 + (p - c0) * (1.0 - std::pow(2.0, -(j + joff)));
      if (dist_to_boundary(k, d) > 1e-7 * diam) out.push_back(d);
    }
  return out;
}

}  // namespace

Mat hessian_B(const Kernel& k, const Vec& x) {
  const auto w = step_weights(k, x);
  const size_t n = k.support_vec.size();
  Mat B = Mat::Zero(k.rank, k.rank);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const Vec d = k.support_vec[i] - k.support_vec[j];
      B += (0.5 * w[i] * w[j]) * (d * d.transpose());
    }
  return B;
}

Saddle saddle(const Kernel& k, const Vec& delta) {
  if (delta.size() != k.rank) throw std::invalid_argument("saddle: rank mismatch");
  Saddle out;
  out.delta = delta;
  out.dist = dist_to_boundary(k, delta);
  if (!(out.dist > 0.0))
    throw std::domain_error(
        "saddle: velocity lies outside the open support hull (boundary distance " +
        std::to_string(out.dist) + ")");

  Vec s = Vec::Zero(k.rank);
  Vec g = grad_log_kappa(k, s) - delta;
  double gn = g.norm();
  const double tol = 1e-12 * (1.0 + delta.norm());
  int it = 0;
  for (; it < 200 && gn > tol; ++it) {
    const Mat H = hessian_B(k, s);
    const Vec step = H.ldlt().solve(-g);
    if (!step.allFinite())
      throw std::runtime_error("saddle: singular Hessian at boundary distance " +
                               std::to_string(out.dist));
    double t = 1.0;
    bool accepted = false;
    while (t >= 1e-12) {
      const Vec s2 = s + t * step;
      const Vec g2 = grad_log_kappa(k, s2) - delta;
      if (g2.norm() <= (1.0 - 0.25 * t) * gn) {
        s = s2;
        g = g2;
        gn = g.norm();
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted)
      throw std::runtime_error(
          "saddle: Newton stagnated at boundary distance " + std::to_string(out.dist));
  }
  if (gn > tol)
    throw std::runtime_error(
        "saddle: no convergence in 200 iterations at boundary distance " +
        std::to_string(out.dist));

  out.s = s;
  out.newton_iters = it;
  out.phi = s.dot(delta) - k.log_kappa(s);
  out.B = hessian_B(k, s);
  out.det_B = out.B.determinant();
  Eigen::SelfAdjointEigenSolver<Mat> es(out.B);
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 0.0))
    throw std::runtime_error("saddle: covariance form is not positive definite");
  out.inv_norm = 1.0 / lmin;
  return out;
}

double rate_phi(const Kernel& k, const Vec& delta) { return saddle(k, delta).phi; }

Vec grad_phi(const Kernel& k, const Vec& delta) { return saddle(k, delta).s; }

cplx phi_var(const Kernel& k, const Vec& x, const Vec& theta, int nodes) {
  check_strip(k, theta);
  std::vector<double> gx, gw;
  gl_rule(nodes, gx, gw);
  cplx acc(0, 0);
  for (int i = 0; i < nodes; ++i)
    acc += gw[i] * (1.0 - gx[i]) * dir_cumulants(k, x, theta, gx[i]).d2;
  return -acc;
}

cplx psi_var(const Kernel& k, const Vec& x, const Vec& theta, int nodes) {
  check_strip(k, theta);
  std::vector<double> gx, gw;
  gl_rule(nodes, gx, gw);
  cplx acc(0, 0);
  for (int i = 0; i < nodes; ++i) {
    const double om = 1.0 - gx[i];
    acc += gw[i] * om * om * dir_cumulants(k, x, theta, gx[i]).d3;
  }
  return cplx(0.0, -3.0) * acc;
}

double hull_diameter(const Kernel& k) {
  double d = 0.0;
  for (size_t i = 0; i < k.support_vec.size(); ++i)
    for (size_t j = i + 1; j < k.support_vec.size(); ++j)
      d = std::max(d, (k.support_vec[i] - k.support_vec[j]).norm());
  return d;
}

std::vector<Vec> hull_grid(const Kernel& k, double rel_spacing, double min_rel_dist,
                           double phase) {
  const double diam = hull_diameter(k);
  const double h = rel_spacing * diam;
  Vec lo = k.support_vec[0], hi = k.support_vec[0];
  for (const Vec& v : k.support_vec) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<Vec> out;
  std::vector<int64_t> n0(k.rank), n1(k.rank), m(k.rank);
  for (int i = 0; i < k.rank; ++i) {
    n0[i] = static_cast<int64_t>(std::floor(lo[i] / h)) - 1;
    n1[i] = static_cast<int64_t>(std::ceil(hi[i] / h)) + 1;
    m[i] = n0[i];
  }
  while (true) {
    Vec p(k.rank);
    for (int i = 0; i < k.rank; ++i) p[i] = (double(m[i]) + phase) * h;
    if (dist_to_boundary(k, p) > min_rel_dist * diam) out.push_back(p);
    int ax = k.rank - 1;
    while (ax >= 0 && m[ax] == n1[ax]) { m[ax] = n0[ax]; --ax; }
    if (ax < 0) break;
    ++m[ax];
  }
  return out;
}

BoundaryFit boundary_exponent_fit(const Kernel& k) {
  // Interior coverage from uniform grids plus near-boundary ladders.  The
  // hold-out ladder descends six rungs (a factor 2^6 in boundary distance)
  // below the training one and is offset half a rung, so a candidate exponent
  // that undershoots the true decay by even 0.25 loses a factor
  // 2^{6*0.25} = 2.8 of margin on the hold-out set and fails verification.
  auto train_pts = hull_grid(k, 0.02, 1e-4);
  for (const Vec& d : boundary_ladder(k, 13, 0.0)) train_pts.push_back(d);
  auto hold_pts = hull_grid(k, 0.011, 1e-4, 0.5);
  for (const Vec& d : boundary_ladder(k, 19, 0.5)) hold_pts.push_back(d);
  const auto train = fit_points(k, train_pts);
  const auto hold = fit_points(k, hold_pts);

  BoundaryFit best;
  for (double eta = 1.0; eta <= 8.0 + 1e-9; eta += 0.5) {
    double cmax = 1e300;
    for (const FitPoint& p : train)
      cmax = std::min(cmax, p.ratio / std::pow(p.dist, eta));
    const double c = 0.5 * cmax;  // safety margin, recorded choice
    double margin = 1e300;
    for (const FitPoint& p : hold)
      margin = std::min(margin, p.ratio / (c * std::pow(p.dist, eta)));
    if (margin >= 1.0) return {eta, c, true, margin};
    if (!best.verified && margin > best.worst_margin) best = {eta, c, false, margin};
  }
  return best;
}

}  // namespace abw
