#include "qconnect/facemodel.hpp"

#include <cmath>
#include <functional>
#include <initializer_list>
#include <sstream>

namespace qconnect {

namespace {

cplx safe_theta_den(cplx x, const QContext& ctx, const char* where) {
  if (x == 0.0 || lattice_index(x, ctx)) {
    std::ostringstream os;
    os << where << ": theta denominator vanishes";
    throw PoleError(os.str());
  }
  return theta(x, ctx);
}

// (n_1, n_2, ...)_inf / (d_1, d_2, ...)_inf
cplx poch_quot(std::initializer_list<cplx> num, std::initializer_list<cplx> den,
               const QContext& ctx) {
  cplx r = 1.0;
  for (cplx x : den) {
    if (auto k = lattice_index(x, ctx); k && *k <= 0)
      throw ResonanceError("infinite product in a denominator vanishes");
    r /= qpoch_inf(x, ctx);
  }
  for (cplx x : num) r *= qpoch_inf(x, ctx);
  return r;
}

cplx tail_product(const CVec& v, int from) {  // v_from * ... * v_end, 1-based
  cplx r = 1.0;
  for (std::size_t i = static_cast<std::size_t>(from - 1); i < v.size(); ++i) r *= v[i];
  return r;
}

cplx tail_sum(const CVec& v, int from) {
  cplx r = 0.0;
  for (std::size_t i = static_cast<std::size_t>(from - 1); i < v.size(); ++i) r += v[i];
  return r;
}

double rel_maxdiff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return scale > 0.0 ? (a - b).cwiseAbs().maxCoeff() / scale : 0.0;
}

Eigen::MatrixXcd embed2(const Eigen::Matrix2cd& w, int n, int i) {
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
  P.block(i - 1, i - 1, 2, 2) = w;
  return P;
}

double braid_residual(const std::function<Eigen::MatrixXcd(int, cplx)>& P, int i, cplx u,
                      cplx v) {
  const Eigen::MatrixXcd lhs = P(i, u) * P(i + 1, u * v) * P(i, v);
  const Eigen::MatrixXcd rhs = P(i + 1, v) * P(i, u * v) * P(i + 1, u);
  return rel_maxdiff(lhs, rhs);
}

}  // namespace

ConnMatrix build_Stilde(const ParamSet& p, int r, const Permutation& sigma, cplx ratio,
                        const QContext& ctx) {
  const int N = p.N(), M = p.M();
  if (r < 1 || r > M - 1) throw IndexError("S~_r needs 1 <= r <= M-1");
  if (ratio == 0.0) throw DomainError("S~_r needs a nonzero ratio");
  const ParamSet ps = p.permuted(sigma);
  const CVec& b = ps.b;
  const cplx q = ctx.q();
  const cplx u = ratio;
  const cplx b_r = b[r - 1], b_r1 = b[r];
  const cplx tail_r = tail_product(b, r), tail_r1 = tail_product(b, r + 1),
             tail_r2 = tail_product(b, r + 2);
  const cplx den = safe_theta_den(u * b_r, ctx, "S~");
  const cplx beta_r_on = tail_sum(ps.beta, r), beta_r2_on = tail_sum(ps.beta, r + 2);

  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(N * M + 1, N * M + 1);
  for (int k = 1; k <= N; ++k) {
    const cplx c = ps.c[k - 1], g = ps.gamma[k - 1];
    const int lo = 1 + (k - 1) * M + (r - 1), hi = lo + 1;
    S(lo, lo) = poch_quot({q / b_r1, b_r}, {q * q * b_r * tail_r2 / c, c / (q * tail_r1)}, ctx) *
                theta(u * c / (q * tail_r1), ctx) / den * cpow(u, -1.0 - beta_r_on + g);
    S(lo, hi) = poch_quot({q * q * tail_r2 / c, q * tail_r / c},
                          {q * q * b_r * tail_r2 / c, q * tail_r1 / c}, ctx) *
                theta(u, ctx) / den * cpow(u, -ps.beta[r - 1]);
    S(hi, lo) = poch_quot({c / tail_r, c / (q * tail_r2)}, {c / (b_r * tail_r2), c / (q * tail_r1)},
                          ctx) *
                theta(u * b_r / b_r1, ctx) / den * cpow(u, -ps.beta[r]);
    S(hi, hi) = poch_quot({q / b_r, b_r1}, {c / (b_r * tail_r2), q * tail_r1 / c}, ctx) *
                theta(u * q * b_r * tail_r2 / c, ctx) / den * cpow(u, 1.0 + beta_r2_on - g);
  }
  CVec point(static_cast<std::size_t>(M), 1.0);
  point[static_cast<std::size_t>(r - 1)] = ratio;
  return {ConnKind::S, M, sigma, r, std::move(S), point};
}

YbeFactors ybe_factors(const ParamSet& p, int r, cplx u, cplx v, const QContext& ctx) {
  const int M = p.M();
  if (r < 1 || r + 2 > M) throw IndexError("braid relation needs 1 <= r and r+2 <= M");
  const Permutation id = Permutation::identity(M);
  const Permutation s1 = Permutation::transposition(M, r);
  const Permutation s2 = Permutation::transposition(M, r + 1);
  YbeFactors f;
  f.lhs = {build_Stilde(p, r, s1.compose(s2), u, ctx).entries,
           build_Stilde(p, r + 1, s1, u * v, ctx).entries,
           build_Stilde(p, r, id, v, ctx).entries};
  f.rhs = {build_Stilde(p, r + 1, s2.compose(s1), v, ctx).entries,
           build_Stilde(p, r, s2, u * v, ctx).entries,
           build_Stilde(p, r + 1, id, u, ctx).entries};
  return f;
}

double ybe_residual(const YbeFactors& f) {
  const Eigen::MatrixXcd lhs = f.lhs[0] * f.lhs[1] * f.lhs[2];
  const Eigen::MatrixXcd rhs = f.rhs[0] * f.rhs[1] * f.rhs[2];
  const double scale = lhs.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (lhs - rhs).cwiseAbs().maxCoeff() / scale : 0.0;
}

double ybe_residual(const ParamSet& p, int r, cplx u, cplx v, const QContext& ctx) {
  return ybe_residual(ybe_factors(p, r, u, v, ctx));
}

FaceWeight2x2 build_Wtilde(cplx al, cplx be, cplx u, const QContext& ctx) {
  auto Q = [&](cplx e) { return ctx.qpow(e); };
  auto th = [&](cplx x) { return theta(x, ctx); };
  const cplx den = safe_theta_den(u * Q(-be), ctx, "W~");
  FaceWeight2x2 W{"Wtilde", al, be, u, {}};
  W.w(0, 0) = cpow(u, al + 3.0 * be + 1.0) * th(Q(-be)) * th(u * Q(al + 2.0 * be + 1.0)) /
              (safe_theta_den(Q(-al - 2.0 * be), ctx, "W~") * den);
  W.w(0, 1) = cpow(u, be) * th(u) / den *
              poch_quot({Q(-al - be), Q(-al - 3.0 * be - 1.0)},
                        {Q(-al - 2.0 * be), Q(-al - 2.0 * be - 1.0)}, ctx);
  W.w(1, 0) = cpow(u, be) * th(u) / den *
              poch_quot({Q(al + 3.0 * be + 2.0), Q(al + be + 1.0)},
                        {Q(al + 2.0 * be + 2.0), Q(al + 2.0 * be + 1.0)}, ctx);
  W.w(1, 1) = cpow(u, -al - be - 1.0) * th(u * Q(-al - 2.0 * be - 1.0)) * th(Q(-be)) /
              (den * safe_theta_den(Q(-al - 2.0 * be - 1.0), ctx, "W~"));
  return W;
}

FaceWeight2x2 build_W_akm(cplx al, cplx be, cplx u, const QContext& ctx) {
  auto Q = [&](cplx e) { return ctx.qpow(e); };
  auto th = [&](cplx x) { return theta(x, ctx); };
  const cplx den = safe_theta_den(u * Q(-be), ctx, "W");
  const cplx th_a = safe_theta_den(Q(-al - 2.0 * be), ctx, "W");
  FaceWeight2x2 W{"W", al, be, u, {}};
  W.w(0, 0) = cpow(u, al + 3.0 * be + 1.0) * th(Q(-be)) * th(u * Q(al + 2.0 * be + 1.0)) /
              (th_a * den);
  W.w(0, 1) = Q(be + 1.0) * cpow(u, be) * th(u) * th(Q(-al - be + 1.0)) *
              th(Q(al + 3.0 * be + 2.0)) / (th_a * th_a * den);
  W.w(1, 0) = cpow(u, be) * th(u) / den;
  W.w(1, 1) = cpow(u, -al - be) * th(Q(-be)) * th(u * Q(-al - 2.0 * be)) / (th_a * den);
  return W;
}

cplx conjugation_factor(cplx al, cplx be, const QContext& ctx) {
  auto Q = [&](cplx e) { return ctx.qpow(e); };
  return poch_quot({Q(al + 3.0 * be + 2.0), Q(al + be + 1.0)},
                   {Q(al + 2.0 * be + 2.0), Q(al + 2.0 * be + 1.0)}, ctx);
}

ConjugacyResiduals conjugacy_residuals(cplx alpha, cplx beta, cplx u, const QContext& ctx,
                                       std::optional<cplx> f_override) {
  const cplx f = f_override.value_or(conjugation_factor(alpha, beta, ctx));
  const Eigen::Matrix2cd Wt = build_Wtilde(alpha, beta, u, ctx).w;
  const Eigen::Matrix2cd W = build_W_akm(alpha, beta, u, ctx).w;
  Eigen::Matrix2cd A = Eigen::Matrix2cd::Identity(), B = Eigen::Matrix2cd::Identity();
  A(1, 1) = f;
  B(0, 0) = f;
  const Eigen::Matrix2cd AB = A * B;
  return {rel_maxdiff(W, A.inverse() * Wt * A), rel_maxdiff(W, B * Wt * B.inverse()),
          rel_maxdiff(AB * W, W * AB)};
}

cplx bracket(cplx x, const QContext& ctx) {
  if (x == 0.0) throw DomainError("bracket needs x != 0");
  const cplx q = ctx.q();
  const cplx s = std::sqrt(x);
  const cplx i(0.0, 1.0);
  return std::pow(q, 0.125) * (s - 1.0 / s) / i * qpoch_inf(q * x, ctx) * qpoch_inf(q / x, ctx) *
         qpoch_inf(q, ctx);
}

FaceWeight2x2 build_Wprime(cplx a_mult, cplx u_mult, cplx unit_mult, const QContext& ctx) {
  auto nonzero = [&](cplx x, const char* what) {
    const cplx v = bracket(x, ctx);
    if (std::abs(v) < 1e-300 || x == 1.0 || lattice_index(x, ctx))
      throw PoleError(std::string("W': bracket ") + what + " vanishes");
    return v;
  };
  const cplx ba = nonzero(a_mult, "[a]");
  const cplx b1 = nonzero(unit_mult, "[1]");
  const cplx bu = bracket(u_mult, ctx);
  FaceWeight2x2 W{"Wprime", a_mult, unit_mult, u_mult, {}};
  W.w(0, 0) = bracket(a_mult / u_mult, ctx) / ba;
  W.w(0, 1) = bu * bracket(a_mult * unit_mult, ctx) * bracket(a_mult / unit_mult, ctx) /
              (b1 * ba * ba);
  W.w(1, 0) = bu / b1;
  W.w(1, 1) = bracket(a_mult * u_mult, ctx) / ba;
  return W;
}

namespace {

// x^{1/2} D W'(q^{-alpha-2beta}, x, q^{beta+1}) D with the stated exponents.
Eigen::Matrix2cd gauged_wprime(cplx al, cplx be, cplx x, const QContext& ctx) {
  const Eigen::Matrix2cd Wp =
      build_Wprime(ctx.qpow(-al - 2.0 * be), x, ctx.qpow(be + 1.0), ctx).w;
  Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero();
  D(0, 0) = cpow(x, (al + 3.0 * be) / 2.0);   // x^{-g_{a+1}}
  D(1, 1) = cpow(x, -(al + be) / 2.0);        // x^{-g_{a-1}}
  return cpow(x, 0.5) * D * Wp * D;
}

}  // namespace

GaugeResiduals gauge_residuals(cplx al, cplx be, cplx x, const QContext& ctx) {
  const Eigen::Matrix2cd lhs = gauged_wprime(al, be, x, ctx);
  const cplx scale = theta(x * ctx.qpow(-be), ctx) /
                     safe_theta_den(ctx.qpow(-be), ctx, "gauge");
  const Eigen::Matrix2cd rhs = scale * build_W_akm(al, be, x, ctx).w;
  Eigen::Matrix2cd E = Eigen::Matrix2cd::Identity();
  E(1, 1) = ctx.qpow(-(be + 1.0) / 2.0);
  GaugeResiduals g;
  g.literal = rel_maxdiff(lhs, rhs);
  g.corrected = rel_maxdiff(E * lhs * E.inverse(), rhs);
  g.offdiag_ratio_01 = lhs(0, 1) / rhs(0, 1);
  g.offdiag_ratio_10 = lhs(1, 0) / rhs(1, 0);
  return g;
}

Eigen::MatrixXcd akm_P(cplx alpha_p, cplx beta_p, int n, int i, cplx u, AkmShift rule,
                       const QContext& ctx) {
  if (i < 1 || i > n - 1) throw IndexError("P_i needs 1 <= i <= n-1");
  const double sign = rule == AkmShift::Plus ? 1.0 : -1.0;
  const cplx al = alpha_p + sign * static_cast<double>(i - 1) * beta_p;
  return embed2(build_W_akm(al, beta_p, u, ctx).w, n, i);
}

double akm_ybe_residual(cplx alpha_p, cplx beta_p, int n, int i, cplx u, cplx v, AkmShift rule,
                        const QContext& ctx) {
  return braid_residual(
      [&](int j, cplx x) { return akm_P(alpha_p, beta_p, n, j, x, rule, ctx); }, i, u, v);
}

Eigen::MatrixXcd wprime_P(cplx alpha_p, cplx beta_p, int n, int i, cplx u, const QContext& ctx) {
  if (i < 1 || i > n - 1) throw IndexError("P_i needs 1 <= i <= n-1");
  const cplx al = alpha_p - static_cast<double>(i - 1) * beta_p;
  const cplx norm = theta(ctx.qpow(-beta_p), ctx) /
                    safe_theta_den(u * ctx.qpow(-beta_p), ctx, "W' chain");
  return embed2(norm * gauged_wprime(al, beta_p, u, ctx), n, i);
}

double wprime_ybe_residual(cplx alpha_p, cplx beta_p, int n, int i, cplx u, cplx v,
                           const QContext& ctx) {
  return braid_residual([&](int j, cplx x) { return wprime_P(alpha_p, beta_p, n, j, x, ctx); },
                        i, u, v);
}

}  // namespace qconnect
