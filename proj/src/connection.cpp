#include "qconnect/connection.hpp"

#include <cmath>
#include <sstream>

namespace qconnect {

namespace {

// Entry assembly shared by A, B and S: infinite-product quotients of
// parameters only, and theta quotients in the connecting variable.
struct Builder {
  const QContext& ctx;

  cplx poch(cplx x) const { return qpoch_inf(x, ctx); }

  cplx inv_poch(cplx x) const {
    if (auto k = lattice_index(x, ctx); k && *k <= 0) {
      std::ostringstream os;
      os << "connection coefficient has a vanishing product (x)_inf, x = q^" << *k;
      throw ResonanceError(os.str());
    }
    return 1.0 / qpoch_inf(x, ctx);
  }

  cplx th(cplx x) const { return theta(x, ctx); }

  cplx inv_th(cplx x) const {
    if (auto k = lattice_index(x, ctx)) {
      std::ostringstream os;
      os << "theta denominator vanishes at the evaluation point (q^" << *k << ")";
      throw PoleError(os.str());
    }
    return 1.0 / theta(x, ctx);
  }
};

cplx prod_range(const CVec& v, int from, int to) {  // 1-based inclusive
  cplx r = 1.0;
  for (int i = from; i <= to; ++i) r *= v[static_cast<std::size_t>(i - 1)];
  return r;
}

cplx sum_range(const CVec& v, int from, int to) {
  cplx r = 0.0;
  for (int i = from; i <= to; ++i) r += v[static_cast<std::size_t>(i - 1)];
  return r;
}

void require_t(const ParamSet& p, const CVec& t) {
  if (static_cast<int>(t.size()) != p.M()) throw ConfigError("t must have M entries");
}

cplx nonzero(cplx x, const char* what) {
  if (x == 0.0) throw DomainError(std::string(what) + " must be nonzero");
  return x;
}

}  // namespace

std::string ConnMatrix::label() const {
  std::ostringstream os;
  switch (kind) {
    case ConnKind::A: os << "A^{" << L << "," << sigma.str() << "}"; break;
    case ConnKind::B: os << "B^{" << L << "," << sigma.str() << "}"; break;
    case ConnKind::S: os << "S_" << r.value_or(0) << "^{" << sigma.str() << "}"; break;
    case ConnKind::Product: os << "C"; break;
  }
  return os.str();
}

ConnMatrix build_A(const ParamSet& p, int L, const Permutation& sigma, const CVec& t,
                   const QContext& ctx) {
  require_t(p, t);
  const int N = p.N(), M = p.M();
  if (L < 0 || L > M - 1) throw IndexError("A^{L} needs 0 <= L <= M-1");
  const ParamSet ps = p.permuted(sigma);
  const Builder f{ctx};
  const cplx q = ctx.q();
  const CVec &a = ps.a, &b = ps.b, &c = ps.c;
  const cplx x = nonzero(t[sigma(L + 1) - 1], "t_{sigma(L+1)}");
  const cplx B1 = prod_range(b, L + 1, M), B2 = prod_range(b, L + 2, M);
  const cplx bl = b[L];
  cplx P = 1.0;
  for (int j = 0; j < N; ++j) P *= a[j] / c[j];
  const cplx den = f.inv_th(x * bl * P);

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(N * M + 1, N * M + 1);
  cplx v = 1.0;
  for (int j = 0; j < N; ++j)
    v *= f.poch(q * B2 / a[j]) * f.poch(q * B1 / c[j]) * f.inv_poch(q * B1 / a[j]) *
         f.inv_poch(q * B2 / c[j]);
  A(0, 0) = v * f.th(x * P) * den * cpow(x, -ps.beta[L]);

  const int l = L + 1;
  const cplx beta_from_l = sum_range(ps.beta, l, M);
  const cplx beta_after_l = sum_range(ps.beta, l + 1, M);
  for (int d = 1; d <= N; ++d) {
    const cplx cd = c[d - 1];
    v = f.poch(bl) * f.inv_poch(cd / (q * B2));
    for (int j = 0; j < N; ++j) {
      v *= f.poch(cd / a[j]) * f.inv_poch(q * B1 / a[j]);
      if (j != d - 1) v *= f.poch(q * B1 / c[j]) * f.inv_poch(cd / c[j]);
    }
    A(0, component_index({d, l}, M)) =
        v * f.th(x * P * cd / (q * B2)) * den * cpow(x, -1.0 - beta_from_l + ps.gamma[d - 1]);
  }
  for (int k = 1; k <= N; ++k) {
    const cplx ak = a[k - 1];
    const int row = component_index({k, l}, M);
    v = f.poch(q / bl) * f.inv_poch(q * ak / B1);
    for (int j = 0; j < N; ++j) {
      if (j != k - 1) v *= f.poch(q * B2 / a[j]) * f.inv_poch(q * ak / a[j]);
      v *= f.poch(q * ak / c[j]) * f.inv_poch(q * B2 / c[j]);
    }
    A(row, 0) = v * f.th(x * B1 * P / ak) * den * cpow(x, -ps.alpha[k - 1] + beta_after_l);
    for (int d = 1; d <= N; ++d) {
      const cplx cd = c[d - 1];
      v = f.poch(cd / B1) * f.inv_poch(q * ak / B1) * f.poch(ak / B2) * f.inv_poch(cd / (q * B2));
      for (int j = 0; j < N; ++j) {
        if (j != k - 1) v *= f.poch(cd / a[j]) * f.inv_poch(q * ak / a[j]);
        if (j != d - 1) v *= f.poch(q * ak / c[j]) * f.inv_poch(cd / c[j]);
      }
      A(row, component_index({d, l}, M)) = v * f.th(x * bl * P * cd / (q * ak)) * den *
                                           cpow(x, -1.0 - ps.alpha[k - 1] + ps.gamma[d - 1]);
    }
  }
  return {ConnKind::A, L, sigma, std::nullopt, std::move(A), t};
}

ConnMatrix build_B(const ParamSet& p, int L, const Permutation& sigma, const CVec& t,
                   const QContext& ctx) {
  require_t(p, t);
  const int N = p.N(), M = p.M();
  if (L < 1 || L > M) throw IndexError("B^{L} needs 1 <= L <= M");
  const ParamSet ps = p.permuted(sigma);
  const Builder f{ctx};
  const cplx q = ctx.q();
  const CVec &a = ps.a, &b = ps.b, &c = ps.c;
  const cplx x = nonzero(t[sigma(L) - 1], "t_{sigma(L)}");
  const cplx BL = prod_range(b, L, M), B1 = prod_range(b, L + 1, M);
  const cplx bL = b[L - 1];
  const cplx den = f.inv_th(x);

  Eigen::MatrixXcd B = Eigen::MatrixXcd::Identity(N * M + 1, N * M + 1);
  cplx v = 1.0;
  for (int j = 0; j < N; ++j)
    v *= f.poch(a[j] / B1) * f.poch(c[j] / BL) * f.inv_poch(a[j] / BL) * f.inv_poch(c[j] / B1);
  B(0, 0) = v * f.th(x * bL) * den * cpow(x, ps.beta[L - 1]);

  const int l = L;
  const cplx beta_after = sum_range(ps.beta, L + 1, M);
  const cplx beta_from = sum_range(ps.beta, L, M);
  for (int d = 1; d <= N; ++d) {
    const cplx ad = a[d - 1];
    v = f.poch(bL) * f.inv_poch(BL / ad);
    for (int j = 0; j < N; ++j) {
      v *= f.poch(c[j] / ad) * f.inv_poch(c[j] / B1);
      if (j != d - 1) v *= f.poch(a[j] / B1) * f.inv_poch(a[j] / ad);
    }
    B(0, component_index({d, l}, M)) =
        v * f.th(x * ad / B1) * den * cpow(x, ps.alpha[d - 1] - beta_after);
  }
  for (int k = 1; k <= N; ++k) {
    const cplx ck = c[k - 1];
    const int row = component_index({k, l}, M);
    v = f.poch(q / bL) * f.inv_poch(q * q * B1 / ck);
    for (int j = 0; j < N; ++j) {
      if (j != k - 1) v *= f.poch(c[j] / BL) * f.inv_poch(q * c[j] / ck);
      v *= f.poch(q * a[j] / ck) * f.inv_poch(a[j] / BL);
    }
    B(row, 0) = v * f.th(x * q * BL / ck) * den * cpow(x, 1.0 + beta_from - ps.gamma[k - 1]);
    for (int d = 1; d <= N; ++d) {
      const cplx ad = a[d - 1];
      v = f.poch(q * B1 / ad) * f.inv_poch(q * q * B1 / ck) * f.poch(q * BL / ck) *
          f.inv_poch(BL / ad);
      for (int j = 0; j < N; ++j) {
        if (j != k - 1) v *= f.poch(c[j] / ad) * f.inv_poch(q * c[j] / ck);
        if (j != d - 1) v *= f.poch(q * a[j] / ck) * f.inv_poch(a[j] / ad);
      }
      B(row, component_index({d, l}, M)) = v * f.th(x * q * ad / ck) * den *
                                           cpow(x, 1.0 + ps.alpha[d - 1] - ps.gamma[k - 1]);
    }
  }
  return {ConnKind::B, L, sigma, std::nullopt, std::move(B), t};
}

ConnMatrix build_S(const ParamSet& p, int r, const Permutation& sigma, const CVec& t,
                   const QContext& ctx) {
  require_t(p, t);
  const int N = p.N(), M = p.M();
  if (r < 1 || r > M - 1) throw IndexError("S_r needs 1 <= r <= M-1");
  const ParamSet ps = p.permuted(sigma);
  const Builder f{ctx};
  const cplx q = ctx.q();
  const CVec& b = ps.b;
  const cplx u = nonzero(t[sigma(r) - 1], "t_{sigma(r)}") /
                 nonzero(t[sigma(r + 1) - 1], "t_{sigma(r+1)}");
  const cplx br = b[r - 1], br1 = b[r];
  const cplx Br = prod_range(b, r, M), Br1 = prod_range(b, r + 1, M), Br2 = prod_range(b, r + 2, M);
  const cplx den = f.inv_th(u * br);
  const cplx beta_from_r = sum_range(ps.beta, r, M);
  const cplx beta_from_r2 = sum_range(ps.beta, r + 2, M);

  Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(N * M + 1, N * M + 1);
  for (int k = 1; k <= N; ++k) {
    const cplx ck = ps.c[k - 1], gk = ps.gamma[k - 1];
    const int i0 = component_index({k, r}, M), i1 = component_index({k, r + 1}, M);
    S(i0, i0) = f.poch(q / br1) * f.poch(br) * f.inv_poch(q * q * br * Br2 / ck) *
                f.inv_poch(ck / (q * Br1)) * f.th(u * ck / (q * Br1)) * den *
                cpow(u, -1.0 - beta_from_r + gk);
    S(i0, i1) = f.poch(q * q * Br2 / ck) * f.poch(q * Br / ck) *
                f.inv_poch(q * q * br * Br2 / ck) * f.inv_poch(q * Br1 / ck) * f.th(u) * den *
                cpow(u, -ps.beta[r - 1]);
    S(i1, i0) = f.poch(ck / Br) * f.poch(ck / (q * Br2)) * f.inv_poch(ck / (br * Br2)) *
                f.inv_poch(ck / (q * Br1)) * f.th(u * br / br1) * den * cpow(u, -ps.beta[r]);
    S(i1, i1) = f.poch(q / br) * f.poch(br1) * f.inv_poch(ck / (br * Br2)) *
                f.inv_poch(q * Br1 / ck) * f.th(u * q * br * Br2 / ck) * den *
                cpow(u, 1.0 + beta_from_r2 - gk);
  }
  return {ConnKind::S, M, sigma, r, std::move(S), t};
}

Permutation apply_word(const Permutation& sigma, const std::vector<int>& word) {
  Permutation out = sigma;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (*it < 1 || *it >= sigma.size()) {
      std::ostringstream os;
      os << "word letter " << *it << " is not an adjacent transposition of S_" << sigma.size();
      throw WordError(os.str());
    }
    out = out.compose(Permutation::transposition(sigma.size(), *it));
  }
  return out;
}

std::vector<int> default_word(const Permutation& sigma1, const Permutation& sigma2) {
  if (sigma1.size() != sigma2.size()) throw WordError("permutations of different sizes");
  std::vector<int> img = sigma1.inverse().compose(sigma2).images();
  std::vector<int> word;
  const int M = static_cast<int>(img.size());
  for (int pass = 0; pass < M; ++pass) {
    for (int j = 0; j + 1 < M - pass; ++j) {
      if (img[j] > img[j + 1]) {
        std::swap(img[j], img[j + 1]);
        word.push_back(j + 1);
      }
    }
  }
  return word;
}

ConnMatrix compose_connection(const ParamSet& p, int L1, const Permutation& sigma1, int L2,
                              const Permutation& sigma2, const std::vector<int>& word,
                              const CVec& t, const QContext& ctx) {
  const int M = p.M();
  if (L1 < 0 || L1 > M || L2 < 0 || L2 > M) throw IndexError("L must lie in [0, M]");
  if (!(apply_word(sigma1, word) == sigma2)) {
    throw WordError("word does not carry " + sigma1.str() + " to " + sigma2.str());
  }
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(p.N() * M + 1, p.N() * M + 1);
  for (int L = L1 + 1; L <= M; ++L) C = build_B(p, L, sigma1, t, ctx).entries * C;
  Permutation sigma = sigma1;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    C = build_S(p, *it, sigma, t, ctx).entries * C;
    sigma = sigma.compose(Permutation::transposition(M, *it));
  }
  for (int L = M - 1; L >= L2; --L) C = build_A(p, L, sigma2, t, ctx).entries * C;
  return {ConnKind::Product, L2, sigma2, std::nullopt, std::move(C), t};
}

ConnMatrix compose_connection(const ParamSet& p, int L1, const Permutation& sigma1, int L2,
                              const Permutation& sigma2, const CVec& t, const QContext& ctx) {
  return compose_connection(p, L1, sigma1, L2, sigma2, default_word(sigma1, sigma2), t, ctx);
}

double verify_connection(const SolutionVector& lhs, const ConnMatrix& C, const SolutionVector& rhs,
                         const QContext&) {
  if (lhs.t != rhs.t || lhs.t != C.eval_point) {
    throw DomainError("connection check needs both vectors and the matrix at one point");
  }
  const auto n = static_cast<Eigen::Index>(lhs.components.size());
  if (C.entries.rows() != n || C.entries.cols() != static_cast<Eigen::Index>(rhs.components.size()))
    throw ConfigError("connection matrix size does not match the vectors");
  Eigen::VectorXcd l(n), r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i) = lhs.components[static_cast<std::size_t>(i)];
    r(i) = rhs.components[static_cast<std::size_t>(i)];
  }
  const double scale = l.cwiseAbs().maxCoeff();
  return scale > 0.0 ? (l - C.entries * r).cwiseAbs().maxCoeff() / scale : 0.0;
}

double pseudo_constancy_defect(const ConnMatrix& m, const ParamSet& p, int s,
                               const QContext& ctx) {
  if (s < 1 || s > p.M()) throw IndexError("shift index out of range");
  CVec t = m.eval_point;
  t[s - 1] *= ctx.q();
  ConnMatrix shifted;
  switch (m.kind) {
    case ConnKind::A: shifted = build_A(p, m.L, m.sigma, t, ctx); break;
    case ConnKind::B: shifted = build_B(p, m.L, m.sigma, t, ctx); break;
    case ConnKind::S: shifted = build_S(p, *m.r, m.sigma, t, ctx); break;
    case ConnKind::Product: throw ConfigError("pseudo-constancy is checked on single factors");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.entries.rows(); ++i)
    for (Eigen::Index j = 0; j < m.entries.cols(); ++j) {
      const cplx e = m.entries(i, j);
      const double d = std::abs(shifted.entries(i, j) - e);
      if (d == 0.0) continue;
      worst = std::max(worst, d / std::abs(e));
    }
  return worst;
}

}  // namespace qconnect
