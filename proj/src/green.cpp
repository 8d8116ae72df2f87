#include "abw/green.hpp"

#include "abw/rate.hpp"
#include "abw/simd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace abw {

namespace {

constexpr double kCriticalGate = 1e-12;
constexpr int64_t kBoxCellGuard = int64_t(1) << 25;
constexpr double kTiltValueGate = 1e-10;
constexpr double kTiltAngleGate = 1e-8;

// zeta * rho with the shared positivity and divergence guards.
double damping_ratio(double zeta, double rho, bool& critical) {
  if (!(zeta > 0)) throw std::invalid_argument("green: zeta must be positive");
  const double c = zeta * rho;
  if (c > 1 + kCriticalGate) {
    std::ostringstream os;
    os << "the resolvent series diverges for zeta * rho > 1; got zeta * rho = "
       << c;
    throw std::domain_error(os.str());
  }
  critical = std::abs(c - 1) <= kCriticalGate;
  return c;
}

// Summation driver shared by both flavors.  term(n) returns zeta^n p_n at
// the requested point and advance() moves the state one step.  Subcritical
// runs stop once the geometric certificate c^n / (1 - c) on the whole
// remaining tail clears tol; critical runs go to cap and the square-root
// tail is extrapolated away from the half-cap partial sum (the terms fall
// off like a power of n with no geometric reserve, and in the slowest case
// the partial sums approach the limit like N^{-1/2}).
template <class Term, class Advance>
GreenResult run_series(double c, bool critical, double tol, int64_t cap,
                       Term term, Advance advance) {
  if (cap < 2)
    throw std::invalid_argument("green_series: cap must be at least 2");
  GreenResult res;
  res.critical = critical;
  long double sum = 0, s_half = 0;
  bool have_half = false;
  for (int64_t n = 0; n <= cap; ++n) {
    if (!critical) {
      const double tail = std::pow(c, double(n)) / (1 - c);
      if (tail <= tol) {
        res.certified = true;
        res.tail_bound = tail;
        break;
      }
    }
    sum += term(n);
    res.terms = n + 1;
    if (critical && n + 1 == cap / 2) {
      s_half = sum;
      have_half = true;
    }
    if (n < cap) advance();
  }
  if (!res.certified) {
    if (critical) {
      if (have_half) {
        const long double corr = (sum - s_half) / (std::sqrt(2.0L) - 1.0L);
        sum += corr;
        res.tail_bound = std::abs(double(corr));
      }
    } else {
      res.tail_bound = std::pow(c, double(res.terms)) / (1 - c);
    }
  }
  res.value = double(sum);
  return res;
}

}  // namespace

GreenResult green_series(const HeatPlan& plan, double zeta, const IKey& omega,
                         double tol, int64_t cap) {
  const Kernel& k = plan.k;
  if (k.flavor != Flavor::building || !k.ctx)
    throw std::invalid_argument(
        "green_series: the heat-plan overload needs a building-flavor kernel");
  for (int i = 0; i < k.rank; ++i)
    if (omega[i] < 0)
      throw std::invalid_argument(
          "green_series: omega must be a dominant key (nonnegative "
          "coordinates)");
  bool critical = false;
  const double c = damping_ratio(zeta, k.rho, critical);

  // The phase e^{-i<theta, omega>} is fixed across terms; the running field
  // carries zeta^n ahat^n / c, so each mean is already the damped term.
  ExpPoly ph(k.rank);
  IKey neg{};
  for (int i = 0; i < k.rank; ++i) neg[i] = -omega[i];
  ph.add(neg, cplx(1.0, 0.0));
  Field phase = make_field(plan.grid);
  synth_exp_poly(plan.grid, ph, phase);

  Field g = plan.invc;
  Field az = plan.ahat;
  for (size_t i = 0; i < az.size(); ++i) {
    az.re[i] *= zeta;
    az.im[i] *= zeta;
  }

  const auto& kk = simd::get();
  Field tmp = make_field(plan.grid);
  auto term = [&](int64_t) {
    tmp = phase;
    kk.cmul_inplace(tmp.re.data(), tmp.im.data(), g.re.data(), g.im.data(),
                    tmp.size());
    return density_from_mean(plan, omega, field_mean(plan.grid, tmp));
  };
  auto advance = [&]() {
    kk.cmul_inplace(g.re.data(), g.im.data(), az.re.data(), az.im.data(),
                    g.size());
  };
  return run_series(c, critical, tol, cap, term, advance);
}

GreenResult green_series(const Kernel& k, double zeta, const IKey& omega,
                         double tol, int64_t cap) {
  if (k.flavor != Flavor::lattice)
    throw std::invalid_argument(
        "green_series: the kernel overload needs an integer-lattice kernel; "
        "building walks go through the heat-plan overload");
  bool critical = false;
  const double c = damping_ratio(zeta, k.rho, critical);

  // Stopping horizon: the first n whose geometric certificate clears tol,
  // found with the identical test the summation loop applies, or cap.
  int64_t horizon = cap;
  if (!critical) {
    for (int64_t n = 0; n <= cap; ++n) {
      if (std::pow(c, double(n)) / (1 - c) <= tol) {
        horizon = n;
        break;
      }
    }
  }

  // A box holding every site reachable within the horizon, so no mass is
  // ever dropped before the series stops.
  const int r = k.rank;
  std::vector<int64_t> lo(r, 0), hi(r, 0);
  uint64_t cells = 1;
  for (int i = 0; i < r; ++i) {
    int32_t smin = 0, smax = 0;
    for (const IKey& s : k.support) {
      smin = std::min(smin, s[i]);
      smax = std::max(smax, s[i]);
    }
    lo[i] = horizon * int64_t(smin);
    hi[i] = horizon * int64_t(smax);
    const uint64_t ext = uint64_t(hi[i] - lo[i] + 1);
    if (cells > uint64_t(kBoxCellGuard) / ext) {
      std::ostringstream os;
      os << "green_series: a horizon of " << horizon
         << " steps needs more than " << kBoxCellGuard
         << " box cells; lower cap or loosen tol";
      throw std::runtime_error(os.str());
    }
    cells *= ext;
  }

  // Row-major flat indices, axis 0 slowest, matching the convolution layout.
  // A target outside the box cannot be reached within the horizon, so every
  // term it would read is exactly zero.
  int64_t idx = 0, idx0 = 0;
  for (int i = 0; i < r; ++i) {
    const int64_t ext = hi[i] - lo[i] + 1;
    if (idx >= 0 && omega[i] >= lo[i] && omega[i] <= hi[i])
      idx = idx * ext + (omega[i] - lo[i]);
    else
      idx = -1;
    idx0 = idx0 * ext + (0 - lo[i]);
  }

  Kernel kz = k;
  for (double& w : kz.cv) w *= zeta;

  std::vector<double> cur(cells, 0.0), next(cells, 0.0);
  cur[size_t(idx0)] = 1.0;
  auto term = [&](int64_t) { return idx >= 0 ? cur[size_t(idx)] : 0.0; };
  auto advance = [&]() {
    convolution_step(kz, lo, hi, cur, next);
    cur.swap(next);
  };
  return run_series(c, critical, tol, cap, term, advance);
}

Vec green_tilt(const Kernel& k, double zeta, const Vec& u) {
  if (u.size() != k.rank)
    throw std::invalid_argument(
        "green_tilt: the direction must have the kernel's ambient dimension");
  const double un = u.norm();
  if (!(un > 0))
    throw std::invalid_argument("green_tilt: the direction must be nonzero");
  bool critical = false;
  const double c = damping_ratio(zeta, k.rho, critical);
  if (critical || !(c < 1 - kCriticalGate))
    throw std::domain_error(
        "the tilt is defined only in the subcritical regime zeta * rho < 1");
  const double target = -std::log(c);
  const Vec dir = u / un;

  // The ray x * dir leaves the support hull at xmax.
  double xmax = std::numeric_limits<double>::infinity();
  for (const Facet& f : k.facets) {
    const double d = f.normal.dot(dir);
    if (d > 1e-14) xmax = std::min(xmax, f.offset / d);
  }
  if (!std::isfinite(xmax) || !(xmax > 0))
    throw std::runtime_error(
        "green_tilt: the direction never leaves the support hull; the walk "
        "support is degenerate");

  // log kappa along the saddle curve rises from its minimum at zero velocity
  // to infinity at the hull boundary; scan toward the boundary for the first
  // overshoot, then bisect.
  double lo = 0, hi = -1;
  double reached = -std::numeric_limits<double>::infinity(), frac = 0;
  for (int j = 1; j <= 48; ++j) {
    const double x = xmax * (1.0 - std::ldexp(1.0, -j));
    double v = 0;
    try {
      v = k.log_kappa(saddle(k, Vec(x * dir)).s);
    } catch (const std::exception&) {
      break;
    }
    if (v >= target) {
      hi = x;
      break;
    }
    lo = x;
    reached = v;
    frac = 1.0 - std::ldexp(1.0, -j);
  }
  if (hi <= 0) {
    std::ostringstream os;
    os << "green_tilt: no bracket: log kappa reached " << reached
       << " at hull fraction " << frac << " against the requested " << target;
    throw std::runtime_error(os.str());
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (k.log_kappa(saddle(k, Vec(mid * dir)).s) < target ? lo : hi) = mid;
  }
  const Vec s = saddle(k, Vec(0.5 * (lo + hi) * dir)).s;

  const double vlog = k.log_kappa(s);
  if (std::abs(vlog - target) >
      kTiltValueGate * std::max(1.0, std::abs(target))) {
    std::ostringstream os;
    os << "green_tilt: the solve did not verify: log kappa at the solution "
          "is "
       << vlog << " against the requested " << target;
    throw std::runtime_error(os.str());
  }
  // Gradient direction from the coefficients, max-shifted for range safety.
  double shift = -std::numeric_limits<double>::infinity();
  for (const Vec& v : k.support_vec) shift = std::max(shift, s.dot(v));
  Vec grad = Vec::Zero(k.rank);
  for (size_t m = 0; m < k.support_vec.size(); ++m)
    grad += k.cv[m] * std::exp(s.dot(k.support_vec[m]) - shift) *
            k.support_vec[m];
  const double gn = grad.norm();
  const double miss = gn > 0 ? (Vec(grad / gn) - dir).norm() : 2.0;
  if (miss > kTiltAngleGate) {
    std::ostringstream os;
    os << "green_tilt: the solve did not verify: the gradient direction "
          "misses u by "
       << miss;
    throw std::runtime_error(os.str());
  }
  return s;
}

double green_estimate(const Kernel& k, double zeta, const IKey& omega) {
  const int r = k.rank;
  Vec w = Vec::Zero(r);
  for (int i = 0; i < r; ++i) w += double(omega[i]) * k.basis.col(i);
  const double wn = w.norm();
  if (!(wn > 0))
    throw std::domain_error(
        "green_estimate: omega must be nonzero; the origin has no direction");

  double p0 = 1.0;
  int npos = 0;
  if (k.flavor == Flavor::building) {
    if (!k.ctx)
      throw std::invalid_argument(
          "green_estimate: a building kernel needs its spherical context");
    for (int i = 0; i < r; ++i)
      if (omega[i] < 0)
        throw std::invalid_argument(
            "green_estimate: omega must be a dominant key (nonnegative "
            "coordinates)");
    p0 = macdonald_at_zero(*k.ctx, w).value.real();
    npos = k.ctx->npos();
  }

  bool critical = false;
  damping_ratio(zeta, k.rho, critical);
  if (critical) return p0 * std::pow(wn, 2.0 - r - 2.0 * npos);
  const Vec s = green_tilt(k, zeta, w);
  return p0 * std::pow(wn, -0.5 * (r - 1) - npos) * std::exp(-s.dot(w));
}

}  // namespace abw
