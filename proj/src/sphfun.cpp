#include "abw/sphfun.hpp"

#include "abw/simd.hpp"

#include <quadmath.h>

#include <cmath>
#include <cstdio>
#include <map>

namespace abw {
namespace {

using cld = std::complex<long double>;

// Minimal complex arithmetic over __float128 for the extrapolation nodes,
// where the alternating sum cancels far below long-double headroom.
struct Q128 {
  __float128 re, im;
};
inline Q128 operator+(const Q128& a, const Q128& b) { return {a.re + b.re, a.im + b.im}; }
inline Q128 operator-(const Q128& a, const Q128& b) { return {a.re - b.re, a.im - b.im}; }
inline Q128 operator*(const Q128& a, const Q128& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Q128 operator/(const Q128& a, const Q128& b) {
  const __float128 d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline Q128& operator+=(Q128& a, const Q128& b) { a = a + b; return a; }
inline Q128& operator*=(Q128& a, const Q128& b) { a = a * b; return a; }

// Uniform spellings so one sum template serves both precisions.
inline cld exp_c(const cld& a) { return std::exp(a); }
inline Q128 exp_c(const Q128& a) {
  const __float128 m = expq(a.re);
  return {m * cosq(a.im), m * sinq(a.im)};
}
inline long double abs_c(const cld& a) { return std::abs(a); }
inline __float128 abs_c(const Q128& a) { return sqrtq(a.re * a.re + a.im * a.im); }

template <class C> C from_d(double re, double im = 0.0);
template <> cld from_d<cld>(double re, double im) { return cld(re, im); }
template <> Q128 from_d<Q128>(double re, double im) {
  return {(__float128)re, (__float128)im};
}
inline cld to_cld(const cld& a) { return a; }
inline cld to_cld(const Q128& a) { return cld((long double)a.re, (long double)a.im); }

template <class C> constexpr long double eps_of();
template <> constexpr long double eps_of<cld>() { return 5.5e-20L; }
template <> constexpr long double eps_of<Q128>() { return 1.93e-34L; }

constexpr double kTwoPi = 6.283185307179586476925286766559;
// The direct antisymmetrized sum is trusted while its estimated relative
// rounding error stays below this; otherwise the value is extrapolated.
constexpr double kDirectCondGate = 1e-12;
// Extrapolation nodes whose own sum is this ill-conditioned are excluded.
constexpr double kNodeCondGate = 1e-10;
constexpr double kLimitResidualGate = 1e-8;

// Distance of a complex pairing to the singular set 2*pi*i*Z.
double wall_distance(const cplx& a) {
  const double m = std::round(a.imag() / kTwoPi);
  return std::abs(a - cplx(0.0, kTwoPi * m));
}

// Per-lambda data shared by every evaluation point: the W-orbit of lambda
// with duplicates merged (as integer coordinates in the fundamental-coweight
// basis) and where each group element lands in it.  Terms with the same orbit
// point then share one exponential, and every exponent is an integer
// combination of the same per-axis pairings, so mathematically equal or
// linearly dependent exponents stay exactly consistent in floating point.
struct WSumPlan {
  std::vector<int> orb_of_w;             // |W| entries
  std::vector<std::vector<int>> orb;     // distinct orbit points, coweight coords
};

WSumPlan make_wsum_plan(const SphericalContext& ctx, const Vec& lambda) {
  WSumPlan plan;
  std::map<std::vector<int>, int> seen;
  for (size_t w = 0; w < ctx.wg.elements.size(); ++w) {
    auto key = ctx.rs.coweight_coords(ctx.winv[w] * lambda, 1e-6);
    auto [it, fresh] = seen.emplace(key, (int)plan.orb.size());
    if (fresh) plan.orb.push_back(it->first);
    plan.orb_of_w.push_back(it->second);
  }
  return plan;
}

// P_lambda(z) * W(q^{-1}) * prod q^{<alpha/2,lambda>}, i.e. the bare W-sum
//   sum_w c(wz) e^{<wz,lambda>} ,
// computed as  [sum_w (-1)^{l(w)} g(wz) e^{<wz,lambda>}] / prod_a 2 sinh(<z,avee>/2)
// with g(z) = prod_a e^{<z,avee>/2} (1 - q_a^{-1} e^{-<z,avee>}).  Multiplying
// c's numerator and denominator by e^{<z,avee>/2} makes the denominator the
// alternating sinh product, which pulls the near-wall blowup out of the sum:
// numerator and denominator vanish together, so the quotient stays
// conditioned where the naive term-by-term sum loses digits.
//
// Every pairing <wz, avee_j> equals +-<z, avee_m> for some positive coroot m,
// so each factor is drawn from one canonical table computed once per call.
// Shared inputs make the alternating cancellation exact up to the working
// precision of the products themselves; independently rounded pairings would
// instead floor the sum at (term size) * (input rounding), orders of
// magnitude above the true value near deep wall intersections.
//
// rel_err estimates the rounding loss of the numerator; callers switch to
// extrapolation (or a higher-precision instantiation) when it grows.
template <class C>
C w_sum_over_delta(const SphericalContext& ctx, const WSumPlan& plan, const CVec& z,
                   double* rel_err = nullptr) {
  const int r = ctx.rank(), np = ctx.npos();
  const C one = from_d<C>(1.0);

  // Everything below is derived from r canonical axis pairings
  //   F_i = <z, fund coweight_i>
  // by integer combinations: coroot pairings via the <alpha_i, avee_j> table
  // and orbit exponents via coweight coordinates.  The Weyl group acts on the
  // F-variables by integer matrices, so the alternating cancellation is a
  // formal identity in them; sharing one set of F values therefore preserves
  // it to working precision, where independently accumulated pairings would
  // break the exact linear relations between exponents that the deep
  // cross-term cancellation relies on.
  std::vector<C> axis(r);
  for (int i = 0; i < r; ++i) {
    C f = from_d<C>(0.0);
    for (int k = 0; k < r; ++k)
      f += from_d<C>(ctx.rs.fund_coweight(k, i)) * from_d<C>(z[k].real(), z[k].imag());
    axis[i] = f;
  }

  // Canonical per-coroot data: delta factor and the g-factor for either
  // orientation.  e^{+-a} are derived from the same half-exponentials, so
  // every appearance of a pairing uses bit-identical values.
  std::vector<C> facp(np), facn(np);
  const C half = from_d<C>(0.5), mhalf = from_d<C>(-0.5);
  C delta = one;
  for (int m = 0; m < np; ++m) {
    C a = from_d<C>(0.0);
    for (int i = 0; i < r; ++i) a += from_d<C>((double)ctx.covee_pair[m][i]) * axis[i];
    const C eh = exp_c(half * a);
    const C ehn = exp_c(mhalf * a);
    delta *= eh - ehn;
    const C qi = from_d<C>(1.0 / ctx.q.for_positive(ctx.rs, m));
    facp[m] = eh * (one - qi * (ehn * ehn));
    facn[m] = ehn * (one - qi * (eh * eh));
  }

  // One exponential per distinct orbit point of lambda.
  std::vector<C> orbe;
  orbe.reserve(plan.orb.size());
  for (const auto& mu : plan.orb) {
    C e = from_d<C>(0.0);
    for (int i = 0; i < r; ++i) e += from_d<C>((double)mu[i]) * axis[i];
    orbe.push_back(exp_c(e));
  }

  // Group by orbit point: the alternating g-products cancel inside each
  // bracket first, then the bounded exponentials weight the brackets.
  std::vector<C> bracket(plan.orb.size(), from_d<C>(0.0));
  long double tmax = 0.0L;
  for (size_t w = 0; w < ctx.wg.elements.size(); ++w) {
    C t = from_d<C>(ctx.sign[w]);
    for (const auto& [m, sgn] : ctx.cop_perm[w]) t *= sgn > 0 ? facp[m] : facn[m];
    const int o = plan.orb_of_w[w];
    tmax = std::max(tmax, (long double)(abs_c(t) * abs_c(orbe[o])));
    bracket[o] += t;
  }
  C num = from_d<C>(0.0);
  for (size_t o = 0; o < bracket.size(); ++o) num += orbe[o] * bracket[o];

  if (rel_err) {
    const long double an = (long double)abs_c(num);
    *rel_err = an > 0.0L ? (double)((long double)ctx.wg.elements.size() * tmax *
                                    eps_of<C>() / an)
                         : 1e300;
  }
  return num / delta;
}

double macdonald_prefactor_log(const SphericalContext& ctx, const Vec& lambda) {
  // -log[ W(q^{-1}) * prod_a q_a^{<alpha/2, lambda>} ]
  double lq = 0.0;
  for (int j = 0; j < ctx.npos(); ++j)
    lq += ctx.log_q_pos[j] * 0.5 * ctx.rs.positive.col(j).dot(lambda);
  return -std::log(ctx.poincare_qinv) - lq;
}

}  // namespace

SphCtxPtr make_spherical_context(RootKind kind, int rank,
                                 const std::vector<double>& q_per_simple) {
  auto ctx = std::make_shared<SphericalContext>();
  ctx->rs = build_root_system(kind, rank);
  const int64_t order = weyl_order(kind, rank);
  if (order > 10000)
    throw std::invalid_argument(
        "spherical context: Weyl group order " + std::to_string(order) +
        " too large for the dense W-sum machinery (use rank <= 4)");
  ctx->wg = weyl_group(ctx->rs);
  ctx->q = make_q_params(ctx->rs, q_per_simple);
  ctx->poincare_qinv = poincare_q_inverse(ctx->rs, ctx->wg, ctx->q);

  const int np = ctx->rs.num_positive();
  // Integer coordinates of each positive coroot in the simple-coroot basis,
  // used to recognize w^{-1} avee_j as a signed positive coroot exactly.
  Eigen::ColPivHouseholderQR<Mat> codec(ctx->rs.cosimple);
  std::vector<std::vector<long>> cocoords(np);
  for (int j = 0; j < np; ++j) {
    const Vec c = codec.solve(ctx->rs.copositive.col(j));
    for (int i = 0; i < ctx->rs.rank; ++i) {
      const long ci = std::lround(c[i]);
      if (std::abs(c[i] - ci) > 1e-6)
        throw std::logic_error("coroot not integral in the simple-coroot basis");
      cocoords[j].push_back(ci);
    }
  }
  auto coroot_index = [&](const Vec& v) -> std::pair<int, int> {
    const Vec c = codec.solve(v);
    std::vector<long> key(ctx->rs.rank);
    for (int i = 0; i < ctx->rs.rank; ++i) {
      key[i] = std::lround(c[i]);
      if (std::abs(c[i] - key[i]) > 1e-6) return {-1, 0};
    }
    for (int m = 0; m < np; ++m) {
      bool pos = true, neg = true;
      for (int i = 0; i < ctx->rs.rank; ++i) {
        pos = pos && key[i] == cocoords[m][i];
        neg = neg && key[i] == -cocoords[m][i];
      }
      if (pos) return {m, 1};
      if (neg) return {m, -1};
    }
    return {-1, 0};
  };
  for (size_t w = 0; w < ctx->wg.elements.size(); ++w) {
    ctx->sign.push_back(ctx->wg.length[w] % 2 == 0 ? 1.0 : -1.0);
    ctx->winv.push_back(ctx->wg.elements[w].transpose());
    std::vector<std::pair<int, int>> perm(np);
    for (int j = 0; j < np; ++j) {
      perm[j] = coroot_index(ctx->winv.back() * ctx->rs.copositive.col(j));
      if (perm[j].first < 0)
        throw std::logic_error("w^{-1} of a positive coroot is not a signed "
                               "positive coroot; root system tables are broken");
      if (ctx->q.for_positive(ctx->rs, j) !=
          ctx->q.for_positive(ctx->rs, perm[j].first))
        throw std::logic_error("coroot permutation changed the q parameter; "
                               "lengths should be preserved");
    }
    ctx->cop_perm.push_back(std::move(perm));
  }
  for (int j = 0; j < np; ++j) {
    std::vector<int> combo(ctx->rs.rank);
    for (int i = 0; i < ctx->rs.rank; ++i) {
      const double p = ctx->rs.simple.col(i).dot(ctx->rs.copositive.col(j));
      combo[i] = static_cast<int>(std::lround(p));
      if (std::abs(p - combo[i]) > 1e-9)
        throw std::logic_error("coroot pairing table not integral");
    }
    ctx->covee_pair.push_back(std::move(combo));
    ctx->log_q_pos.push_back(std::log(ctx->q.for_positive(ctx->rs, j)));
  }
  return ctx;
}

cplx c_function(const SphericalContext& ctx, const CVec& z) {
  if (z.size() != ctx.rank()) throw std::invalid_argument("c_function: rank mismatch");
  cplx prod(1, 0);
  for (int j = 0; j < ctx.npos(); ++j) {
    cplx a(0, 0);
    for (int i = 0; i < ctx.rank(); ++i) a += ctx.rs.copositive(i, j) * z[i];
    if (wall_distance(a) < 1e-13 * (1.0 + std::abs(a)))
      throw std::domain_error(
          "c_function: pole, <z, coroot> lies in 2*pi*i*Z for positive root #" +
          std::to_string(j));
    const double qi = 1.0 / ctx.q.for_positive(ctx.rs, j);
    prod *= (1.0 - qi * std::exp(-a)) / (1.0 - std::exp(-a));
  }
  return prod;
}

MacdonaldValue macdonald_eval(const SphericalContext& ctx, const Vec& lambda,
                              const CVec& z) {
  if (z.size() != ctx.rank() || lambda.size() != ctx.rank())
    throw std::invalid_argument("macdonald_eval: rank mismatch");
  ctx.rs.coweight_coords(lambda);  // validates lattice membership
  if (!ctx.rs.is_dominant(lambda, 1e-9))
    throw std::invalid_argument("macdonald_eval: lambda must be dominant");

  const double pref = macdonald_prefactor_log(ctx, lambda);
  const WSumPlan plan = make_wsum_plan(ctx, lambda);

  double cond = 0.0;
  const cld direct = w_sum_over_delta<cld>(ctx, plan, z, &cond);
  if (cond <= kDirectCondGate && std::isfinite((double)std::abs(direct))) {
    MacdonaldValue out;
    out.value = cplx((double)(direct.real() * std::exp((long double)pref)),
                     (double)(direct.imag() * std::exp((long double)pref)));
    return out;
  }

  // Wall (or near-wall) argument: extrapolate along z + eps*u, u strictly
  // dominant so every pairing leaves its wall at linear speed.  The node
  // scale shrinks with the top oscillation frequency, else the polynomial
  // model behind the extrapolation does not converge for large lambda.
  const Vec u = ctx.rs.rho_coweight;
  double maxfreq = 0.0;
  for (size_t w = 0; w < ctx.wg.elements.size(); ++w)
    maxfreq = std::max(maxfreq, std::abs((ctx.winv[w] * lambda).dot(u)));
  for (int j = 0; j < ctx.npos(); ++j)
    maxfreq += std::abs(ctx.rs.copositive.col(j).dot(u));
  const double eps_base = std::min(1e-2, 0.7 / (1.0 + maxfreq));

  constexpr int kMaxNodes = 8;
  std::vector<cld> diag;      // Neville tableau, current row
  std::vector<long double> xs;
  cld best(0, 0);
  double best_resid = 1e300;
  int best_nodes = 0;
  cld prev_estimate(0, 0);
  for (int k = 0; k < kMaxNodes; ++k) {
    const long double eps = (long double)eps_base * std::pow(0.5L, k);
    CVec zk = z;
    for (int i = 0; i < ctx.rank(); ++i) zk[i] += cplx((double)eps * u[i], 0.0);
    double node_cond = 0.0;
    cld row = to_cld(w_sum_over_delta<Q128>(ctx, plan, zk, &node_cond));
    // shrinking eps worsens the conditioning monotonically; once a node is
    // dominated by rounding even in quad precision it can only poison the
    // tableau, so stop there
    if (node_cond > kNodeCondGate && k >= 2) break;
    xs.push_back(eps);
    // extend the tableau row: T[k][m] interpolates nodes k-m..k at 0
    std::vector<cld> next(k + 1);
    next[0] = row;
    for (int m = 1; m <= k; ++m)
      next[m] = (xs[k] * diag[m - 1] - xs[k - m] * next[m - 1]) / (xs[k] - xs[k - m]);
    diag = std::move(next);
    const cld est = diag[k];
    if (k > 0) {
      const double resid = (double)std::abs(est - prev_estimate) /
                           ((double)std::abs(est) + 1e-300);
      if (resid < best_resid) {
        best_resid = resid;
        best = est;
        best_nodes = k + 1;
      }
      if (resid < 1e-11) break;  // already at the noise floor
    }
    prev_estimate = est;
  }

  if (best_resid > kLimitResidualGate) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "macdonald_eval: limit-mode extrapolation residual %.3e exceeds "
                  "gate %.3e (%d usable nodes)",
                  best_resid, kLimitResidualGate, (int)xs.size());
    throw std::domain_error(msg);
  }

  MacdonaldValue out;
  out.limit_mode = true;
  out.residual = best_resid;
  out.nodes = best_nodes;
  const long double scale = std::exp((long double)pref);
  out.value = cplx((double)(best.real() * scale), (double)(best.imag() * scale));
  return out;
}

MacdonaldValue macdonald_at_zero(const SphericalContext& ctx, const Vec& lambda) {
  CVec z = CVec::Zero(ctx.rank());
  return macdonald_eval(ctx, lambda, z);
}

TorusGrid make_context_grid(const SphericalContext& ctx, int N) {
  return TorusGrid(ctx.rs.simple, ctx.covee_pair, N);
}

ExpPoly macdonald_exp_poly(const SphericalContext& ctx, const Vec& lambda) {
  const auto coords = ctx.rs.coweight_coords(lambda);
  if (!ctx.rs.is_dominant(lambda, 1e-9))
    throw std::invalid_argument("macdonald_exp_poly: lambda must be dominant");
  const int r = ctx.rank();

  // Per-axis frequency extent: coordinates of the W-orbit of lambda.
  std::vector<int> span(r, 0);
  for (const auto& w : ctx.wg.elements) {
    const auto c = ctx.rs.coweight_coords(w * lambda, 1e-6);
    for (int i = 0; i < r; ++i) span[i] = std::max(span[i], std::abs(c[i]));
  }
  int maxspan = 0;
  for (int s : span) maxspan = std::max(maxspan, s);
  int N = 16;
  while (N <= 2 * maxspan + 8) N *= 2;
  double pts = std::pow(double(N), r);
  if (pts > double(1 << 22))
    throw std::invalid_argument(
        "macdonald_exp_poly: lambda too large for extraction (grid would need " +
        std::to_string((long long)pts) + " points)");

  TorusGrid grid = make_context_grid(ctx, N);

  // Sample P_lambda(i theta) on every node through the full evaluator, so
  // nodes close to points where several walls meet fall back to the
  // extrapolated value instead of a cancellation-damaged direct sum.
  Field f = make_field(grid);
  std::vector<int> idx(r, 0);
  for (size_t flat = 0;; ++flat) {
    const Vec theta = grid.node(idx);
    CVec z(r);
    for (int i = 0; i < r; ++i) z[i] = cplx(0.0, theta[i]);
    const cplx v = macdonald_eval(ctx, lambda, z).value;
    f.re[flat] = v.real();
    f.im[flat] = v.imag();
    int ax = r - 1;
    while (ax >= 0 && ++idx[ax] == N) idx[ax--] = 0;
    if (ax < 0) break;
  }

  const Field bins = dft_all_bins(grid, f);

  // Candidate keys: box of the orbit, restricted to the saturation of
  // lambda (dominant representative below lambda with the gap an integer
  // combination of coroots); everything else in the box carries quadrature
  // noise only.
  Eigen::ColPivHouseholderQR<Mat> cosolve(ctx.rs.cosimple);
  ExpPoly poly(r);
  std::vector<int> k(r);
  for (int i = 0; i < r; ++i) k[i] = -span[i];
  while (true) {
    IKey key{};
    for (int i = 0; i < r; ++i) key[i] = k[i];
    const Vec v = ctx.rs.coweight_point(k);
    const Vec gap = lambda - to_dominant(ctx.rs, v);
    const Vec cc = cosolve.solve(gap);
    bool in_support = true;
    for (int i = 0; i < r; ++i)
      if (cc[i] < -1e-6 || std::abs(cc[i] - std::round(cc[i])) > 1e-4)
        in_support = false;
    if (in_support) {
      const cplx c = mean_against_key(grid, bins, key);
      if (std::abs(c) > 1e-14) poly.add(key, c);
    }
    int ax = r - 1;
    while (ax >= 0 && ++k[ax] > span[ax]) {
      k[ax] = -span[ax];
      --ax;
    }
    if (ax < 0) break;
  }
  poly.truncate(1e-12);
  return poly;
}

Field invc_field(const SphericalContext& ctx, const TorusGrid& grid) {
  // 1/c(i theta) = prod_a (1 - e^{-i<theta,avee>}) / (1 - q_a^{-1} e^{-i<theta,avee>})
  // assembled from single-phase fields; no poles anywhere on an offset grid.
  const auto& kk = simd::get();
  Field num = make_field(grid), den = make_field(grid);
  std::fill(num.re.begin(), num.re.end(), 1.0);
  std::fill(den.re.begin(), den.re.end(), 1.0);
  for (int j = 0; j < ctx.npos(); ++j) {
    ExpPoly ph(ctx.rank());
    IKey key{};
    for (int i = 0; i < ctx.rank(); ++i) key[i] = -ctx.covee_pair[j][i];
    ph.add(key, 1.0);
    Field e = make_field(grid);
    synth_exp_poly(grid, ph, e);
    Field fac_num = e, fac_den = e;
    const double qi = 1.0 / ctx.q.for_positive(ctx.rs, j);
    for (size_t t = 0; t < e.size(); ++t) {
      fac_num.re[t] = 1.0 - e.re[t];
      fac_num.im[t] = -e.im[t];
      fac_den.re[t] = 1.0 - qi * e.re[t];
      fac_den.im[t] = -qi * e.im[t];
    }
    kk.cmul_inplace(num.re.data(), num.im.data(), fac_num.re.data(), fac_num.im.data(), num.size());
    kk.cmul_inplace(den.re.data(), den.im.data(), fac_den.re.data(), fac_den.im.data(), den.size());
  }
  kk.cdiv_inplace(num.re.data(), num.im.data(), den.re.data(), den.im.data(), num.size());
  return num;
}

Field invc2_field(const SphericalContext& ctx, const TorusGrid& grid) {
  Field f = invc_field(ctx, grid);
  for (size_t t = 0; t < f.size(); ++t) {
    f.re[t] = f.re[t] * f.re[t] + f.im[t] * f.im[t];
    f.im[t] = 0.0;
  }
  return f;
}

double vertex_count(const SphericalContext& ctx, const Vec& lambda) {
  const ExpPoly poly = macdonald_exp_poly(ctx, lambda);
  const int r = ctx.rank();

  // |P|^2 doubles the frequency span of P; size the first grid accordingly,
  // then refine until the quadrature settles (the non-polynomial 1/|c|^2
  // factor converges geometrically in N).
  const auto span = poly.key_span();
  int maxspan = 0;
  for (int i = 0; i < r; ++i) maxspan = std::max(maxspan, (int)span[i]);
  int N = 32;
  while (N <= 2 * maxspan + 8) N *= 2;

  const auto& kk = simd::get();
  double prev = 0.0;
  bool have_prev = false;
  for (; std::pow(double(N), r) <= double(1 << 22); N *= 2) {
    TorusGrid grid = make_context_grid(ctx, N);
    Field p = make_field(grid);
    synth_exp_poly(grid, poly, p);
    Field w = invc2_field(ctx, grid);
    // numerator mean: |P|^2 / |c|^2 ; denominator mean: 1 / |c|^2
    std::vector<double> prod(p.size());
    for (size_t t = 0; t < p.size(); ++t)
      prod[t] = (p.re[t] * p.re[t] + p.im[t] * p.im[t]) * w.re[t];
    const double num = kk.sum(prod.data(), prod.size());
    const double den = kk.sum(w.re.data(), w.re.size());
    const double inv_n = num / den;
    if (inv_n <= 0.0)
      throw std::domain_error("vertex_count: quadrature produced a nonpositive value");
    const double count = 1.0 / inv_n;
    if (have_prev && std::abs(count - prev) <= 1e-9 * prev) return count;
    prev = count;
    have_prev = true;
  }
  throw std::runtime_error("vertex_count: quadrature did not converge before the grid cap");
}

}  // namespace abw
