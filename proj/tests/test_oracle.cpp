#include <cmath>

#include "doctest.h"
#include "qconnect/hyperseries.hpp"
#include "qconnect/oracle.hpp"
#include "qconnect/sampling.hpp"

using namespace qconnect;

namespace {

const QContext ctx{};

QContext with_q(double q) {
  QSettings s;
  s.q = q;
  return QContext(s);
}

ParamSet exps(CVec al, CVec be, CVec ga, const QContext& c = ctx) {
  return ParamSet::from_exponents(al, be, ga, c);
}

Field series_of(const MultParams& p, const QContext& c = ctx) {
  return [p, c](const CVec& x) { return eval_FNM(p, x, c).value; };
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("F satisfies the first-order and mixed equations") {
  const ParamSet p = exps({0.35}, {0.25, 0.6}, {0.75});
  const CVec t{cplx(0.2, 0.05), cplx(-0.15, 0.1)};
  const Field f = series_of(p);
  CHECK(residual_eqn1(f, p, 1, t, ctx) < 1e-10);
  CHECK(residual_eqn1(f, p, 2, t, ctx) < 1e-10);
  CHECK(residual_eqn2(f, p, 1, 2, t, ctx) < 1e-10);
}

TEST_CASE("the constant function is not a solution") {
  const ParamSet p = exps({0.35}, {0.25, 0.6}, {0.75});
  const Field one = [](const CVec&) { return cplx(1.0); };
  CHECK(residual_eqn1(one, p, 1, {0.2, 0.3}, ctx) > 1e-2);
}

TEST_CASE("eqn2 index checks") {
  const ParamSet p = exps({0.35}, {0.25, 0.6}, {0.75});
  const Field f = series_of(p);
  CHECK_THROWS_AS(residual_eqn2(f, p, 2, 2, {0.1, 0.1}, ctx), IndexError);
  CHECK_THROWS_AS(residual_eqn2(f, p, 2, 1, {0.1, 0.1}, ctx), IndexError);
  CHECK_THROWS_AS(residual_eqn1(f, p, 3, {0.1, 0.1}, ctx), IndexError);
}

TEST_CASE("eqn2 is symmetric under exchanging the two variables") {
  const ParamSet p = exps({0.35}, {0.25, 0.6}, {0.75});
  MultParams sw = p;
  std::swap(sw.b[0], sw.b[1]);
  const Field g = [](const CVec& x) { return std::exp(x[0]) * x[1] * x[1] + x[0]; };
  const Field h = [&](const CVec& x) { return g({x[1], x[0]}); };
  const CVec t{cplx(0.3, 0.1), cplx(0.7, -0.2)};
  const double a = residual_eqn2(g, p, 1, 2, t, ctx);
  const double b = residual_eqn2(h, sw, 1, 2, {t[1], t[0]}, ctx);
  CHECK(a > 1e-3);
  CHECK(std::abs(a - b) < 1e-14);
}

TEST_CASE("residuals are invariant under scaling the function") {
  const ParamSet p = exps({0.35}, {0.25, 0.6}, {0.75});
  const Field g = [](const CVec& x) { return std::exp(x[0] - x[1]); };
  const Field g7 = [&](const CVec& x) { return cplx(-7.0, 2.0) * g(x); };
  const CVec t{0.3, 0.4};
  CHECK(residual_eqn1(g, p, 1, t, ctx) == doctest::Approx(residual_eqn1(g7, p, 1, t, ctx)));
  CHECK(residual_eqn2(g, p, 1, 2, t, ctx) == doctest::Approx(residual_eqn2(g7, p, 1, 2, t, ctx)));
}

TEST_CASE("total shift product on monomials") {
  const CVec delta{cplx(0.4, 0.1), cplx(-0.7, 0.3)};
  const Field mono = [&](const CVec& x) { return cpow(x[0], delta[0]) * cpow(x[1], delta[1]); };
  const CVec coeffs{cplx(0.5, 0.2), cplx(-0.3, 0.6), 0.9};
  const CVec t{cplx(0.8, 0.1), cplx(1.3, -0.2)};
  cplx want = mono(t);
  for (cplx a : coeffs) want *= 1.0 - a * ctx.qpow(delta[0] + delta[1]);
  CHECK(rel(apply_total_shift_product(mono, coeffs, t, ctx), want) < 1e-14);
}

TEST_CASE("direct summation agrees with the shell engine") {
  const ParamSet p = exps({0.3, 0.45}, {0.2, 0.6, 0.4}, {0.7, 0.35});
  const CVec t{cplx(0.3, 0.1), cplx(-0.2, 0.25), cplx(0.1, -0.4)};
  CHECK(rel(direct_FNM(p, t, ctx), eval_FNM(p, t, ctx).value) < 1e-12);
}

TEST_CASE("duality at N = 1 is Heine's transformation") {
  const cplx a(0.4, 0.1), b(0.3, -0.2), c(0.7, 0.15), t(0.35, 0.2);
  const ResidualReport rep = check_duality(MultParams{{a}, {b}, {c}}, {t}, ctx);
  CHECK(rep.residual < 1e-12);
  const cplx heine = qpoch_inf(a, ctx) * qpoch_inf(b * t, ctx) / (qpoch_inf(c, ctx) * qpoch_inf(t, ctx)) *
                     eval_nphi({c / a, t}, {b * t}, a, ctx).value;
  CHECK(rel(rep.rhs, heine) < 1e-12);
  CHECK(rel(rep.lhs, eval_nphi({a, b}, {c}, t, ctx).value) < 1e-14);
}

TEST_CASE("duality at (2,2) and the involution between (2,3) and (3,2)") {
  Rng rng(8);
  ParamRequest req;
  req.N = 2;
  req.M = 2;
  const ParamSet p = sample_params(req, rng, ctx);
  CHECK(check_duality(p, {cplx(0.3, 0.1), cplx(-0.25, 0.2)}, ctx).residual < 1e-10);

  // The reverse direction sums in the a_j, so keep them well inside the disc.
  const ParamSet p23 = exps({0.8, 0.9}, {0.2, 0.65, 0.4}, {0.45, 0.35});
  const CVec t{cplx(0.3, 0.05), cplx(0.45, -0.1), cplx(-0.2, 0.2)};
  const ResidualReport fwd = check_duality(p23, t, ctx);
  MultParams dual;
  for (int i = 0; i < 3; ++i) {
    dual.a.push_back(t[i]);
    dual.c.push_back(p23.b[i] * t[i]);
  }
  for (int j = 0; j < 2; ++j) dual.b.push_back(p23.c[j] / p23.a[j]);
  const ResidualReport back = check_duality(dual, p23.a, ctx);
  CHECK(fwd.residual < 1e-10);
  CHECK(back.residual < 1e-10);
  // The two prefactors are reciprocal, so the round trip returns to F(p23; t).
  CHECK(rel(fwd.lhs, back.rhs * fwd.rhs / back.lhs) < 1e-12);
}

TEST_CASE("duality needs |a_j| < 1") {
  CHECK_THROWS_AS(check_duality(MultParams{{1.5}, {0.3}, {0.7}}, {0.2}, ctx), DomainError);
}

TEST_CASE("Jackson integral") {
  const QContext c4 = with_q(0.4);
  const ParamSet p11 = exps({0.45}, {0.3}, {1.2}, c4);
  const ResidualReport r11 = check_jackson(p11, {cplx(0.35, 0.1)}, c4);
  CHECK(r11.residual < 1e-9);

  const ParamSet p22 = exps({0.4, 0.3}, {0.25, 0.55}, {1.1, 0.9});
  const ResidualReport zero = check_jackson(p22, {0.0, 0.0}, ctx);
  CHECK(std::abs(zero.lhs - 1.0) == 0.0);
  CHECK(std::abs(zero.rhs - 1.0) < 1e-12);
  CHECK(check_jackson(p22, {cplx(0.3, -0.1), cplx(0.2, 0.2)}, ctx).residual < 1e-9);
}

TEST_CASE("Watson expansion around infinity") {
  const QContext c35 = with_q(0.35);
  // Both expansion variables t and q b/(a1 a2 t) stay below 0.6.
  const CVec up1{cplx(0.4, 0.05), cplx(0.6, -0.1)}, lo1{cplx(0.05, 0.01)};
  CHECK(check_watson(up1, lo1, 0.5, c35).residual < 1e-11);

  const CVec up2{cplx(0.5, 0.1), cplx(0.7, -0.05), cplx(0.45, 0.2)};
  const CVec lo2{cplx(0.1, 0.02), cplx(0.0, 0.15)};
  CHECK(check_watson(up2, lo2, cplx(0.5, 0.1), ctx).residual < 1e-10);

  CHECK_THROWS_AS(check_watson(up1, lo1, 0.01, c35), DomainError);
  CHECK_THROWS_AS(check_watson({0.4, 0.4 * 0.35 * 0.35}, {0.02}, 0.55, c35), ResonanceError);
}

TEST_CASE("Casorati determinant basics") {
  const Field f = [](const CVec& x) { return cpow(x[0], 0.3); };
  const Field g = [](const CVec& x) { return cpow(x[0], cplx(-0.4, 0.2)); };
  const CVec t{0.5};
  CHECK(std::abs(casorati_independence({f, f}, {1}, t, ctx)) < 1e-15);
  const cplx d = casorati_independence({f, g}, {1}, t, ctx);
  CHECK(std::abs(d) > 1e-2);
  CHECK(std::abs(casorati_independence({g, f}, {1}, t, ctx) + d) < 1e-15);
  const PointFilter small = [](const CVec& x) { return std::abs(x[0]) > 0.2; };
  CHECK_THROWS_AS(casorati_independence({f, g}, {1}, t, ctx, small), DomainError);
}

TEST_CASE("Casorati determinant of the classical pair") {
  const ParamSet p = exps({0.35}, {0.55}, {0.8});
  const Permutation id = Permutation::identity(1);
  std::vector<Field> pair;
  for (const auto& cid : component_ids(1, 1))
    pair.push_back([&, cid](const CVec& x) { return local_solution(p, 1, id, cid, x, ctx); });
  std::vector<CVec> ex;
  for (const auto& e : char_exponents(p, 1)) ex.push_back(e.delta);
  const CVec t{0.2};
  const PointFilter inside = [&](const CVec& x) { return in_domain(1, id, p, x, ctx).inside; };
  const auto shift = select_casorati_shift(ex, t, ctx, inside);
  REQUIRE(shift.has_value());
  CHECK(std::abs(casorati_independence(pair, *shift, t, ctx, inside)) > 1e-6);
}

TEST_CASE("Casorati shift selection prefers separated exponents") {
  const std::vector<CVec> ex{{0.0, 0.0}, {0.5, 0.0}, {0.5, 0.02}};
  const auto best = select_casorati_shift(ex, {0.1, 0.1}, ctx);
  REQUIRE(best.has_value());
  // The third exponent differs from the second only in the second slot.
  CHECK((*best)[1] != 0);
  CHECK(exponent_vandermonde_score(ex, *best, ctx) >=
        exponent_vandermonde_score(ex, {1, 0}, ctx));
  CHECK(exponent_vandermonde_score(ex, {1, 0}, ctx) < 1e-12);
}

TEST_CASE("exponent equations reject a wrong exponent") {
  const ParamSet p = exps({0.3, 0.45}, {0.2, 0.6}, {0.7, 0.35});
  const CVec good = char_exponents(p, 1)[1].delta;
  CHECK(exponent_equations_residual(p, 1, good, ctx) < 1e-10);
  CVec bad = good;
  bad[0] += 0.1;
  CHECK(exponent_equations_residual(p, 1, bad, ctx) > 1e-3);
}
