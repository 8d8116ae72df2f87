#include "abw/building.hpp"

#include "abw/simd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace abw {

namespace {

constexpr double kImagGateRel = 1e-7;   // imaginary residue, relative part
constexpr double kImagGateAbs = 1e-12;  // and the absolute allowance
constexpr double kRouteGateHeat = 1e-6;
constexpr double kRouteGateCal = 2e-6;
constexpr double kPivotGate = 1e-12;
constexpr double kResidualGate = 1e-10;

void require_building(const Kernel& k, const char* who) {
  if (k.flavor != Flavor::building || !k.ctx)
    throw std::invalid_argument(std::string(who) +
                                ": needs a building-flavor kernel");
}

Vec key_point(const RootSystem& rs, const IKey& key) {
  std::vector<int> coords(rs.rank);
  for (int i = 0; i < rs.rank; ++i) coords[i] = key[i];
  return rs.coweight_point(coords);
}

void require_dominant_key(const IKey& key, int rank, const char* who) {
  for (int i = 0; i < rank; ++i)
    if (key[i] < 0)
      throw std::invalid_argument(
          std::string(who) +
          ": omega must be a dominant key (nonnegative coordinates)");
}

// ahat^n * (1/c) sampled on the grid.
Field weighted_power(const HeatPlan& plan, int64_t n) {
  const auto& kk = simd::get();
  Field f = plan.ahat;
  kk.cpow_inplace(f.re.data(), f.im.data(), f.size(),
                  static_cast<uint64_t>(n));
  kk.cmul_inplace(f.re.data(), f.im.data(), plan.invc.re.data(),
                  plan.invc.im.data(), f.size());
  return f;
}

}  // namespace

// cal * pref(omega) * Re(mean) with the imaginary-residue gate shared by the
// single-point, all-points, and resolvent paths.
double density_from_mean(const HeatPlan& plan, const IKey& omega, cplx mean) {
  if (std::abs(mean.imag()) >
      kImagGateRel * std::abs(mean.real()) + kImagGateAbs) {
    std::ostringstream os;
    os << "building density has an imaginary residue " << mean.imag()
       << " against real part " << mean.real()
       << "; the torus grid is too coarse or its wall offset is defective";
    throw std::runtime_error(os.str());
  }
  const SphericalContext& ctx = *plan.k.ctx;
  const Vec w = key_point(ctx.rs, omega);
  double lq = 0;
  for (int j = 0; j < ctx.npos(); ++j)
    lq += 0.5 * ctx.log_q_pos[j] * ctx.rs.positive.col(j).dot(w);
  return plan.cal * std::exp(-lq) * mean.real();
}

namespace {

cplx mean_single_key(const TorusGrid& grid, const Field& f, const IKey& omega) {
  ExpPoly ph(grid.rank());
  IKey neg{};
  for (int i = 0; i < grid.rank(); ++i) neg[i] = -omega[i];
  ph.add(neg, cplx(1.0, 0.0));
  Field e = make_field(grid);
  synth_exp_poly(grid, ph, e);
  const auto& kk = simd::get();
  kk.cmul_inplace(e.re.data(), e.im.data(), f.re.data(), f.im.data(), e.size());
  return field_mean(grid, e);
}

// Both calibration routes on one grid: the smooth mean of 1/c and the
// squared-modulus mean scaled by W(q^{-1}) / |W|.  They are equal functions
// of the context, so a gap flags a sampling defect.
std::pair<double, double> calibration_routes(const SphericalContext& ctx,
                                             const TorusGrid& grid) {
  // the imaginary part carries only the frequency-folding tail, which is
  // genuinely of order (1 - 1/q) near q = 1; gate it at the route tolerance
  const Field ic = invc_field(ctx, grid);
  const cplx m1 = field_mean(grid, ic);
  if (!(m1.real() > 0) || std::abs(m1.imag()) > kRouteGateCal * m1.real())
    throw std::runtime_error(
        "Plancherel weight mean is not a positive real; the offset grid is "
        "defective");
  const Field ic2 = invc2_field(ctx, grid);
  const double m2 = field_mean(grid, ic2).real();
  const double via_sq =
      1.0 / (ctx.poincare_qinv / static_cast<double>(ctx.wg.order()) * m2);
  return {1.0 / m1.real(), via_sq};
}

}  // namespace

HeatPlan make_heat_plan(const Kernel& k, int N) {
  require_building(k, "make_heat_plan");
  const SphericalContext& ctx = *k.ctx;
  HeatPlan plan{k, make_context_grid(ctx, N), Field{}, Field{}, 0.0, 0.0};
  plan.invc = invc_field(ctx, plan.grid);

  const auto [cal, c_norm] = calibration_routes(ctx, plan.grid);
  if (std::abs(cal - c_norm) > kRouteGateHeat * std::abs(c_norm)) {
    std::ostringstream os;
    os << "normalization routes disagree: smooth-weight mean gives " << cal
       << ", squared-modulus mean gives " << c_norm
       << "; raise the grid resolution";
    throw std::runtime_error(os.str());
  }
  plan.cal = cal;
  plan.c_norm = c_norm;

  plan.ahat = make_field(plan.grid);
  synth_exp_poly(plan.grid, k.ahat, plan.ahat);
  return plan;
}

double plancherel_calibrate(const SphericalContext& ctx, int N) {
  const TorusGrid grid = make_context_grid(ctx, N);
  const auto [cal, c_norm] = calibration_routes(ctx, grid);
  if (std::abs(cal - c_norm) > kRouteGateCal * std::abs(c_norm)) {
    std::ostringstream os;
    os << "Plancherel normalization routes disagree at resolution " << N
       << ": " << cal << " vs " << c_norm;
    throw std::runtime_error(os.str());
  }
  return c_norm;
}

double exact_pn_quadrature(const HeatPlan& plan, int64_t n, const IKey& omega) {
  if (n < 0)
    throw std::invalid_argument("exact_pn_quadrature: n must be >= 0");
  require_dominant_key(omega, plan.k.rank, "exact_pn_quadrature");
  const Field f = weighted_power(plan, n);
  return density_from_mean(plan, omega, mean_single_key(plan.grid, f, omega));
}

std::vector<std::pair<IKey, double>> exact_pn_all(const HeatPlan& plan,
                                                  int64_t n) {
  if (n < 0) throw std::invalid_argument("exact_pn_all: n must be >= 0");
  const Kernel& k = plan.k;
  const int r = k.rank;
  const Field f = weighted_power(plan, n);
  const Field bins = dft_all_bins(plan.grid, f);

  const auto kmax = k.ahat.key_max();
  std::vector<int64_t> cap(r);
  size_t total = 1;
  for (int i = 0; i < r; ++i) {
    cap[i] = std::min<int64_t>(n * std::max<int32_t>(kmax[i], 0),
                               plan.grid.n() - 1);
    total *= static_cast<size_t>(cap[i] + 1);
    if (total > (size_t(1) << 22))
      throw std::invalid_argument(
          "exact_pn_all: reachable key box exceeds the enumeration budget");
  }

  const double slack = 1e-9 * hull_diameter(k);
  std::vector<std::pair<IKey, double>> out;
  std::vector<int64_t> c(r, 0);
  for (;;) {
    IKey key{};
    for (int i = 0; i < r; ++i) key[i] = static_cast<int32_t>(c[i]);
    bool keep = true;
    if (n > 0) {
      const Vec vel = key_point(k.ctx->rs, key) / static_cast<double>(n);
      keep = dist_to_boundary(k, vel) >= -slack;
    } else {
      for (int i = 0; i < r; ++i) keep = keep && c[i] == 0;
    }
    if (keep)
      out.emplace_back(
          key, density_from_mean(plan, key,
                              mean_against_key(plan.grid, bins, key)));
    int ax = r - 1;
    while (ax >= 0 && c[ax] == cap[ax]) {
      c[ax] = 0;
      --ax;
    }
    if (ax < 0) break;
    ++c[ax];
  }
  return out;
}

double building_mass(const HeatPlan& plan, int64_t n) {
  const SphericalContext& ctx = *plan.k.ctx;
  double mass = 0;
  for (const auto& [key, p] : exact_pn_all(plan, n))
    mass += vertex_count(ctx, key_point(ctx.rs, key)) * p;
  return mass;
}

std::map<IKey, double> macdonald_expand(const SphericalContext& ctx,
                                        const ExpPoly& f) {
  if (f.rank() != ctx.rank())
    throw std::invalid_argument("macdonald_expand: rank mismatch");
  if (f.size() > 200000)
    throw std::invalid_argument(
        "macdonald_expand: too many terms; use the quadrature route (torus "
        "sampling) for long times");
  const int r = ctx.rank();
  const double scale = std::max(f.max_abs_coeff(), 1e-300);

  // strictly dominance-monotone height: positive on every positive coroot
  Vec rho_root = Vec::Zero(r);
  for (int j = 0; j < ctx.npos(); ++j) rho_root += 0.5 * ctx.rs.positive.col(j);

  std::map<IKey, cplx> rem(f.terms());
  std::map<IKey, ExpPoly> cache;
  std::map<IKey, double> out;

  auto dominant = [&](const IKey& key) {
    for (int i = 0; i < r; ++i)
      if (key[i] < 0) return false;
    return true;
  };

  for (int iter = 0;; ++iter) {
    if (iter > 200000)
      throw std::runtime_error(
          "macdonald_expand: elimination failed to terminate");
    bool found = false;
    IKey pivot{};
    double best_h = 0;
    for (const auto& [key, c] : rem) {
      if (std::abs(c) <= kPivotGate * scale || !dominant(key)) continue;
      const double h = rho_root.dot(key_point(ctx.rs, key));
      if (!found || h > best_h + 1e-12 ||
          (std::abs(h - best_h) <= 1e-12 && key > pivot)) {
        found = true;
        best_h = h;
        pivot = key;
      }
    }
    if (!found) break;

    auto pit = cache.find(pivot);
    if (pit == cache.end())
      pit = cache
                .emplace(pivot,
                         macdonald_exp_poly(ctx, key_point(ctx.rs, pivot)))
                .first;
    const ExpPoly& pp = pit->second;
    const auto lead_it = pp.terms().find(pivot);
    if (lead_it == pp.terms().end() || std::abs(lead_it->second) < kPivotGate)
      throw std::runtime_error(
          "macdonald_expand: degenerate leading coefficient at an elimination "
          "pivot");
    const cplx b = rem.at(pivot) / lead_it->second;
    if (std::abs(b.imag()) > 1e-9 * (1.0 + std::abs(b)))
      throw std::runtime_error(
          "macdonald_expand: expansion coefficient is not real; the input "
          "spectrum is not Weyl-symmetric");
    for (const auto& [key, c] : pp.terms()) {
      auto it = rem.emplace(key, cplx(0.0, 0.0)).first;
      it->second -= b * c;
    }
    rem.erase(pivot);
    out[pivot] = b.real();
  }

  double residual = 0;
  for (const auto& [key, c] : rem) residual = std::max(residual, std::abs(c));
  if (residual > kResidualGate * scale) {
    std::ostringstream os;
    os << "macdonald_expand: elimination residual " << residual
       << " exceeds " << kResidualGate * scale
       << "; the input is not in the span of the spherical basis";
    throw std::runtime_error(os.str());
  }
  return out;
}

double exact_pn_crosscheck(const Kernel& k, int64_t n, const IKey& omega) {
  require_building(k, "exact_pn_crosscheck");
  if (n < 0)
    throw std::invalid_argument("exact_pn_crosscheck: n must be >= 0");
  if (n > 64)
    throw std::invalid_argument(
        "exact_pn_crosscheck: the expansion route grows exponentially with n; "
        "use the quadrature route for long times");
  require_dominant_key(omega, k.rank, "exact_pn_crosscheck");
  const auto b = macdonald_expand(*k.ctx, k.ahat.pow(static_cast<int>(n)));
  const auto it = b.find(omega);
  if (it == b.end()) return 0.0;
  return it->second / vertex_count(*k.ctx, key_point(k.ctx->rs, omega));
}

std::vector<double> tree_exact_pn(
    double q, const std::vector<std::pair<int, double>>& steps, int64_t n) {
  if (!(q > 0)) throw std::invalid_argument("tree_exact_pn: q must be > 0");
  if (n < 0) throw std::invalid_argument("tree_exact_pn: n must be >= 0");
  if (steps.empty())
    throw std::invalid_argument("tree_exact_pn: empty step list");
  int maxm = 0;
  double mass = 0;
  for (const auto& [m, a] : steps) {
    if (m < 0 || a < 0)
      throw std::invalid_argument("tree_exact_pn: bad step entry");
    maxm = std::max(maxm, m);
    mass += a;
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw std::invalid_argument("tree_exact_pn: step masses must sum to 1");
  if (maxm == 0)
    throw std::invalid_argument("tree_exact_pn: needs a step of radius >= 1");

  using ld = long double;
  const int64_t dmax = n * maxm;
  const size_t len = static_cast<size_t>(dmax + maxm + 2);
  if (len > (size_t(1) << 24))
    throw std::invalid_argument("tree_exact_pn: time horizon too large");

  const ld lq = static_cast<ld>(q);
  // mass flow of one radius-1 averaging step along the distance chain
  auto apply1 = [&](const std::vector<ld>& in) {
    std::vector<ld> outv(len, 0.0L);
    outv[1] += in[0];
    for (size_t d = 1; d + 1 < len; ++d) {
      outv[d + 1] += in[d] * lq / (lq + 1.0L);
      outv[d - 1] += in[d] / (lq + 1.0L);
    }
    return outv;
  };

  std::vector<ld> prof(len, 0.0L);
  prof[0] = 1.0L;
  for (int64_t t = 0; t < n; ++t) {
    // radius ladder by the three-term recurrence of sphere averages
    std::vector<std::vector<ld>> ladder(maxm + 1);
    ladder[0] = prof;
    if (maxm >= 1) ladder[1] = apply1(prof);
    for (int m = 1; m < maxm; ++m) {
      std::vector<ld> up = apply1(ladder[m]);
      ladder[m + 1].assign(len, 0.0L);
      for (size_t d = 0; d < len; ++d)
        ladder[m + 1][d] =
            (lq + 1.0L) / lq * up[d] - ladder[m - 1][d] / lq;
    }
    std::vector<ld> next(len, 0.0L);
    for (const auto& [m, a] : steps)
      for (size_t d = 0; d < len; ++d)
        next[d] += static_cast<ld>(a) * ladder[m][d];
    prof.swap(next);
  }

  std::vector<double> out(static_cast<size_t>(dmax + 1));
  for (int64_t m = 0; m <= dmax; ++m) {
    const ld nm =
        m == 0 ? 1.0L : (lq + 1.0L) * std::pow(lq, static_cast<ld>(m - 1));
    out[static_cast<size_t>(m)] =
        static_cast<double>(prof[static_cast<size_t>(m)] / nm);
  }
  return out;
}

double heat_estimate_tilted(const Kernel& k, int64_t n, const IKey& omega) {
  require_building(k, "heat_estimate_tilted");
  if (n < 1)
    throw std::invalid_argument("heat_estimate_tilted: n must be >= 1");
  require_dominant_key(omega, k.rank, "heat_estimate_tilted");
  const SphericalContext& ctx = *k.ctx;
  const int r = k.rank;
  const Vec w = key_point(ctx.rs, omega);

  const Vec delta =
      (w + ctx.rs.rho_coweight) / static_cast<double>(n + r);
  if (dist_to_boundary(k, delta) <= 0)
    throw std::domain_error(
        "heat_estimate_tilted: the tilted velocity (omega + rho)/(n + rank) "
        "lies outside the open support hull");
  const Vec vel = w / static_cast<double>(n);
  if (dist_to_boundary(k, vel) <= 0)
    throw std::domain_error(
        "heat_estimate_tilted: the velocity omega/n lies outside the open "
        "support hull, so the rate function is not defined there");

  const Saddle sp = saddle(k, delta);
  const double phin = rate_phi(k, vel);

  double lq = 0;
  for (int j = 0; j < ctx.npos(); ++j)
    lq += 0.5 * ctx.log_q_pos[j] * ctx.rs.positive.col(j).dot(w);

  double prod = 1.0;
  for (int j = 0; j < ctx.npos(); ++j)
    prod *= std::sinh(0.5 * sp.s.dot(ctx.rs.copositive.col(j)));

  const double expo = -lq + static_cast<double>(n) * (std::log(k.rho) - phin) -
                      0.5 * r * std::log(static_cast<double>(n)) -
                      0.5 * std::log(sp.det_B);
  return std::exp(expo) * prod;
}

double heat_estimate_fixed_velocity(const Kernel& k, int64_t n,
                                    const IKey& omega, double eps) {
  require_building(k, "heat_estimate_fixed_velocity");
  if (n < 1)
    throw std::invalid_argument(
        "heat_estimate_fixed_velocity: n must be >= 1");
  require_dominant_key(omega, k.rank, "heat_estimate_fixed_velocity");
  const SphericalContext& ctx = *k.ctx;
  const Vec w = key_point(ctx.rs, omega);
  const Vec vel = w / static_cast<double>(n);
  const double dist = dist_to_boundary(k, vel);
  if (dist < eps) {
    std::ostringstream os;
    os << "heat_estimate_fixed_velocity: needs dist(omega/n, hull boundary) "
          ">= "
       << eps << " but the velocity has distance " << dist;
    throw std::domain_error(os.str());
  }
  const double phin = rate_phi(k, vel);
  const double p0 = macdonald_at_zero(ctx, w).value.real();
  const double expo =
      static_cast<double>(n) * (std::log(k.rho) - phin) -
      (0.5 * k.rank + ctx.npos()) * std::log(static_cast<double>(n));
  return std::exp(expo) * p0;
}

UpperBoundReport global_upper_bound(const HeatPlan& plan, int64_t n,
                                    double n_exp, double c_const) {
  const Kernel& k = plan.k;
  const SphericalContext& ctx = *k.ctx;
  if (n < 1)
    throw std::invalid_argument("global_upper_bound: n must be >= 1");

  const double diam = hull_diameter(k);
  const double dmin = 1e-9 * diam;
  Vec ctr = Vec::Zero(k.rank);
  for (const Vec& v : k.support_vec) ctr += v;
  ctr /= static_cast<double>(k.support_vec.size());

  UpperBoundReport rep;
  rep.pass = true;
  for (const auto& [key, p] : exact_pn_all(plan, n)) {
    if (!(p > 0)) continue;
    const Vec w = key_point(ctx.rs, key);
    Vec vel = w / static_cast<double>(n);
    if (dist_to_boundary(k, vel) < dmin) {
      // phi extends continuously to the closed hull; evaluate a hair inside
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Vec x = ctr + mid * (vel - ctr);
        (dist_to_boundary(k, x) >= dmin ? lo : hi) = mid;
      }
      vel = ctr + lo * (vel - ctr);
    }
    const double phin = rate_phi(k, vel);
    const double p0 = macdonald_at_zero(ctx, w).value.real();
    const double bound =
        c_const * std::pow(static_cast<double>(n), n_exp) *
        std::exp(static_cast<double>(n) * (std::log(k.rho) - phin)) * p0;
    const double margin = p / bound;
    if (margin > rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_omega = key;
    }
  }
  rep.pass = rep.worst_margin <= 1.0;
  return rep;
}

}  // namespace abw
