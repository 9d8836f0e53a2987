#include <cmath>
#include <random>

#include "doctest.h"
#include "qconnect/qkernel.hpp"

using namespace qconnect;

namespace {

QContext make_ctx(double q) {
  QSettings s;
  s.q = q;
  return QContext(s);
}

cplx random_c(std::mt19937_64& g, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return {u(g), u(g)};
}

// Plain truncated product, independent of the context's term count.
cplx naive_poch_inf(cplx a, cplx q, int terms) {
  cplx p = 1.0, qk = 1.0;
  for (int k = 0; k < terms; ++k) {
    p *= 1.0 - a * qk;
    qk *= q;
  }
  return p;
}

}  // namespace

TEST_CASE("prod_terms is the smallest K with |q|^K below the cutoff") {
  const QContext ctx = make_ctx(0.3);
  const int K = ctx.prod_terms();
  CHECK(std::pow(0.3, K) < 1e-17);
  CHECK(std::pow(0.3, K - 1) >= 1e-17);
}

TEST_CASE("qpoch_inf against a long direct product") {
  const QContext ctx = make_ctx(0.45);
  for (cplx a : {cplx(0.3, 0.1), cplx(-1.7, 0.4), cplx(2.5, -3.0)}) {
    const cplx ref = naive_poch_inf(a, 0.45, 400);
    CHECK(std::abs(qpoch_inf(a, ctx) - ref) <= 1e-14 * std::abs(ref));
  }
  CHECK(std::abs(qpoch_inf(0.0, ctx) - 1.0) == 0.0);
}

TEST_CASE("finite q-Pochhammer values") {
  const QContext ctx = make_ctx(0.3);
  const cplx a(0.4, 0.2);
  CHECK(qpoch(a, 0, ctx) == cplx(1.0));
  CHECK(std::abs(qpoch(a, 2, ctx) - (1.0 - a) * (1.0 - a * 0.3)) < 1e-15);
  CHECK(std::abs(qpoch(a, -1, ctx) - 1.0 / (1.0 - a / 0.3)) < 1e-14);
}

TEST_CASE("qpoch splits over consecutive ranges") {
  const QContext ctx = make_ctx(0.3);
  std::mt19937_64 g(11);
  std::uniform_int_distribution<int> pick(-20, 20);
  for (int trial = 0; trial < 200; ++trial) {
    const cplx a = random_c(g, 2.0);
    if (lattice_distance(a, ctx) < 1e-3) continue;
    const int m = pick(g), n = pick(g);
    const cplx lhs = qpoch(a, m + n, ctx);
    const cplx rhs = qpoch(a, m, ctx) * qpoch(a * ctx.qpow(m), n, ctx);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("qpoch(a, m) qpoch(a q^m, -m) = 1") {
  const QContext ctx = make_ctx(0.3);
  const cplx a(0.55, -0.35);
  for (int m = -10; m <= 10; ++m) {
    const cplx v = qpoch(a, m, ctx) * qpoch(a * ctx.qpow(m), -m, ctx);
    CHECK(std::abs(v - 1.0) < 1e-12);
  }
}

TEST_CASE("theta zeros and quasi-periodicity") {
  const QContext ctx = make_ctx(0.25);
  CHECK(std::abs(theta(1.0, ctx)) == 0.0);
  CHECK(std::abs(theta(0.25, ctx)) < 1e-15);
  const cplx x(0.7, 0.1);
  const cplx direct = naive_poch_inf(0.25 * x, 0.25, 200) * naive_poch_inf(0.25 / (0.25 * x), 0.25, 200);
  CHECK(std::abs(theta(0.25 * x, ctx) - direct) < 1e-13);
  CHECK(std::abs(theta(0.25 * x, ctx) + theta(x, ctx) / x) < 1e-12);
  CHECK_THROWS_AS(theta(0.0, ctx), DomainError);
}

TEST_CASE("theta reflection and shift at random points") {
  const QContext ctx = make_ctx(0.3);
  std::mt19937_64 g(5);
  for (int i = 0; i < 100; ++i) {
    const cplx x = std::polar(std::exp(std::uniform_real_distribution<double>(-1.5, 1.5)(g)),
                              std::uniform_real_distribution<double>(-3.0, 3.0)(g));
    const cplx th = theta(x, ctx);
    const double scale = std::max(1.0, std::abs(th));
    CHECK(std::abs(th - theta(0.3 / x, ctx)) < 1e-11 * scale);
    CHECK(std::abs(theta(0.3 * x, ctx) + th / x) < 1e-11 * scale * std::max(1.0, 1.0 / std::abs(x)));
  }
}

TEST_CASE("cpow principal branch") {
  CHECK(cpow(cplx(2.0, 1.0), 0.0) == cplx(1.0));
  CHECK(std::abs(cpow(4.0, 0.5) - 2.0) < 1e-15);
  CHECK(std::abs(cpow(1.0, cplx(0.3, 2.0)) - 1.0) < 1e-15);
  CHECK(std::abs(cpow(-1.0, 0.5) - cplx(0.0, 1.0)) < 1e-15);  // Arg = pi
  CHECK(cpow(0.0, cplx(0.5, 0.0)) == cplx(0.0));
  CHECK_THROWS_AS(cpow(0.0, cplx(-0.5, 1.0)), DomainError);
  CHECK_THROWS_AS(cpow(0.0, 0.0), DomainError);

  const cplx t(0.8, -0.6), al(0.3, 0.7), be(-1.1, 0.2);
  CHECK(std::abs(cpow(t, al + be) - cpow(t, al) * cpow(t, be)) < 1e-13);
}

TEST_CASE("qpow matches cpow of q") {
  const QContext ctx = make_ctx(0.3);
  CHECK(std::abs(ctx.qpow(3) - 0.027) < 1e-16);
  CHECK(std::abs(ctx.qpow(-2) - 1.0 / 0.09) < 1e-13);
  const cplx al(0.4, -0.15);
  CHECK(std::abs(ctx.qpow(al) - cpow(0.3, al)) < 1e-15);
}

TEST_CASE("multi-index signed sums") {
  CHECK(mindex_nl(MultiIndex({2, 3}), 0) == -5);
  CHECK(mindex_nl(MultiIndex({2, 3}), 2) == 5);
  CHECK(mindex_nl(MultiIndex({1, 2, 3}), 1) == -4);
  CHECK(mindex_nl_prime(MultiIndex({1, 2, 3}), 1) == 1 - 3);
  CHECK(mindex_nl_prime(MultiIndex({1, 2, 3}), 0) == -5);
  CHECK_THROWS_AS(mindex_nl(MultiIndex({1, 2}), 3), IndexError);
  CHECK_THROWS_AS(mindex_nl(MultiIndex({1, 2}), -1), IndexError);
  CHECK(MultiIndex({4, 1, 0}).total() == 5);
}

TEST_CASE("lattice detection") {
  const QContext ctx = make_ctx(0.3);
  CHECK(lattice_index(1.0, ctx) == 0);
  CHECK(lattice_index(ctx.qpow(3), ctx) == 3);
  CHECK(lattice_index(ctx.qpow(-5) * (1.0 + 1e-10), ctx) == -5);
  CHECK_FALSE(lattice_index(ctx.qpow(cplx(0.5, 0.1)), ctx).has_value());
  CHECK(lattice_distance(ctx.qpow(2) * 1.01, ctx) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("permutations") {
  const Permutation s = Permutation::transposition(3, 2);
  CHECK(s.images() == std::vector<int>{1, 3, 2});
  const Permutation c({2, 3, 1});
  CHECK(c.compose(c.inverse()).is_identity());
  CHECK(c.compose(s)(2) == c(s(2)));
  CHECK_THROWS(Permutation({1, 1, 2}));
}

TEST_CASE("from_exponents and permuted parameters") {
  const QContext ctx = make_ctx(0.3);
  const ParamSet p = ParamSet::from_exponents({0.2}, {0.3, 0.6}, {0.7}, ctx);
  CHECK(std::abs(p.b[1] - ctx.qpow(0.6)) < 1e-15);
  const ParamSet ps = p.permuted(Permutation::transposition(2, 1));
  CHECK(ps.b[0] == p.b[1]);
  CHECK(ps.beta[0] == p.beta[1]);
  CHECK(ps.a == p.a);
}
