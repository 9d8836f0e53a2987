#include "qconnect/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <sstream>

#include "qconnect/hyperseries.hpp"

namespace qconnect {

namespace {

CVec scaled_point(const CVec& t, cplx all, int s, cplx extra) {
  CVec out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i] * all;
  if (s >= 0) out[static_cast<std::size_t>(s)] *= extra;
  return out;
}

double relative_sum(const CVec& terms) {
  cplx sum = 0.0;
  double scale = 0.0;
  for (cplx x : terms) {
    sum += x;
    scale = std::max(scale, std::abs(x));
  }
  return scale > 0.0 ? std::abs(sum) / scale : 0.0;
}

double rel_diff(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

// Convolution of two sequences, truncated to their natural length.
CVec convolve(const CVec& x, const CVec& y) {
  CVec out(x.size() + y.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// (b)_n/(q)_n t^n for n < K, by direct recurrence.
CVec binomial_weights(cplx b, cplx t, int K, cplx q) {
  CVec w(static_cast<std::size_t>(K));
  cplx v = 1.0, qn = 1.0;
  for (int n = 0; n < K; ++n) {
    w[static_cast<std::size_t>(n)] = v;
    v *= (1.0 - b * qn) / (1.0 - qn * q) * t;
    qn *= q;
  }
  return w;
}

cplx box_sum(const MultParams& p, const CVec& t, int K, const QContext& ctx) {
  const cplx q = ctx.q();
  CVec g = binomial_weights(p.b[0], t[0], K, q);
  for (int i = 1; i < p.M(); ++i) g = convolve(g, binomial_weights(p.b[i], t[i], K, q));
  cplx sum = 0.0, coupling = 1.0, qn = 1.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    sum += coupling * g[n];
    for (int j = 0; j < p.N(); ++j) coupling *= (1.0 - p.a[j] * qn) / (1.0 - p.c[j] * qn);
    qn *= q;
  }
  return sum;
}

}  // namespace

double residual_eqn1(const Field& f, const MultParams& p, int s, const CVec& t,
                     const QContext& ctx) {
  const int N = p.N(), M = p.M();
  if (s < 1 || s > M) throw IndexError("eqn1 needs 1 <= s <= M");
  if (static_cast<int>(t.size()) != M) throw ConfigError("t must have M entries");
  const cplx q = ctx.q();
  std::map<std::pair<int, int>, cplx> cache;
  auto value = [&](int n, int e) {
    auto key = std::make_pair(n, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const cplx v = f(scaled_point(t, ctx.qpow(n), s - 1, e ? q : cplx(1.0)));
    cache.emplace(key, v);
    return v;
  };
  CVec terms;
  for (unsigned mask = 0; mask < (1u << N); ++mask) {
    int n = 0;
    cplx ca = 1.0, cc = 1.0;
    for (int j = 0; j < N; ++j) {
      if (mask & (1u << j)) {
        ++n;
        ca *= -p.a[j];
        cc *= -p.c[j] / q;
      }
    }
    for (int e = 0; e < 2; ++e) {
      const cplx v = value(n, e);
      terms.push_back(t[s - 1] * ca * (e ? -p.b[s - 1] : cplx(1.0)) * v);
      terms.push_back(-cc * (e ? -1.0 : 1.0) * v);
    }
  }
  return relative_sum(terms);
}

double residual_eqn2(const Field& f, const MultParams& p, int r, int s, const CVec& t,
                     const QContext& ctx) {
  const int M = p.M();
  if (r < 1 || s > M || r >= s) throw IndexError("eqn2 needs 1 <= r < s <= M");
  if (static_cast<int>(t.size()) != M) throw ConfigError("t must have M entries");
  const cplx q = ctx.q();
  CVec terms;
  for (int er = 0; er < 2; ++er) {
    for (int es = 0; es < 2; ++es) {
      CVec pt = t;
      if (er) pt[r - 1] *= q;
      if (es) pt[s - 1] *= q;
      const cplx v = f(pt);
      terms.push_back(t[r - 1] * (er ? -p.b[r - 1] : cplx(1.0)) * (es ? -1.0 : 1.0) * v);
      terms.push_back(-t[s - 1] * (es ? -p.b[s - 1] : cplx(1.0)) * (er ? -1.0 : 1.0) * v);
    }
  }
  return relative_sum(terms);
}

cplx apply_total_shift_product(const Field& f, const CVec& coeffs, const CVec& t,
                               const QContext& ctx) {
  const int n = static_cast<int>(coeffs.size());
  cplx out = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    int size = 0;
    cplx c = 1.0;
    for (int j = 0; j < n; ++j) {
      if (mask & (1u << j)) {
        ++size;
        c *= -coeffs[static_cast<std::size_t>(j)];
      }
    }
    out += c * f(scaled_point(t, ctx.qpow(size), -1, 1.0));
  }
  return out;
}

cplx direct_nphi(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx) {
  if (upper.size() != lower.size() + 1) throw ConfigError("need N+1 upper and N lower parameters");
  const cplx q = ctx.q();
  cplx sum = 0.0, term = 1.0, qn = 1.0;
  int quiet = 0;
  for (int n = 0; n < 20000; ++n) {
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) {
      if (++quiet >= 5) return sum;
    } else {
      quiet = 0;
    }
    cplx ratio = t / (1.0 - qn * q);
    for (cplx u : upper) ratio *= 1.0 - u * qn;
    for (cplx l : lower) ratio /= 1.0 - l * qn;
    term *= ratio;
    qn *= q;
  }
  throw ConvergenceError("direct n+1 phi n sum did not settle");
}

cplx direct_FNM(const MultParams& p, const CVec& t, const QContext& ctx) {
  if (static_cast<int>(t.size()) != p.M()) throw ConfigError("t must have M entries");
  for (cplx x : t)
    if (!(std::abs(x) < 1.0)) throw DomainError("box sum needs |t_i| < 1");
  cplx prev = box_sum(p, t, 16, ctx);
  for (int K = 32; K <= 2048; K *= 2) {
    const cplx cur = box_sum(p, t, K, ctx);
    if (std::abs(cur - prev) <= 1e-15 * std::abs(cur)) return cur;
    prev = cur;
  }
  throw ConvergenceError("box sum did not settle within 2048 terms per variable");
}

ResidualReport check_duality(const MultParams& p, const CVec& t, const QContext& ctx) {
  for (cplx x : t)
    if (!(std::abs(x) < 1.0)) throw DomainError("duality needs |t_i| < 1");
  for (cplx a : p.a)
    if (!(std::abs(a) < 1.0)) throw DomainError("duality needs |a_j| < 1");
  ResidualReport rep;
  rep.lhs = eval_FNM(p, t, ctx).value;
  MultParams swapped;
  CVec vars;
  for (int i = 0; i < p.M(); ++i) {
    swapped.a.push_back(t[i]);
    swapped.c.push_back(p.b[i] * t[i]);
  }
  for (int j = 0; j < p.N(); ++j) {
    swapped.b.push_back(p.c[j] / p.a[j]);
    vars.push_back(p.a[j]);
  }
  cplx pre = 1.0;
  for (int j = 0; j < p.N(); ++j) pre *= qpoch_inf(p.a[j], ctx) / qpoch_inf(p.c[j], ctx);
  for (int i = 0; i < p.M(); ++i) pre *= qpoch_inf(p.b[i] * t[i], ctx) / qpoch_inf(t[i], ctx);
  rep.rhs = pre * direct_FNM(swapped, vars, ctx);
  rep.residual = rel_diff(rep.lhs, rep.rhs);
  return rep;
}

ResidualReport check_jackson(const ParamSet& p, const CVec& t, const QContext& ctx) {
  for (cplx x : t)
    if (!(std::abs(x) < 1.0)) throw DomainError("Jackson check needs |t_i| < 1");
  const cplx q = ctx.q();
  constexpr int kCap = 400;
  CVec h{1.0};
  for (int j = 0; j < p.N(); ++j) {
    if (!(std::abs(p.a[j]) < 1.0)) throw DomainError("Jackson weights need |q^alpha| < 1");
    CVec w;
    double peak = 0.0;
    bool settled = false;
    for (int m = 0; m < kCap; ++m) {
      const cplx qm = ctx.qpow(m);
      const cplx v = std::pow(p.a[j], m) * qpoch_inf(qm * q, ctx) /
                     qpoch_inf(p.c[j] * qm / p.a[j], ctx);
      w.push_back(v);
      peak = std::max(peak, std::abs(v));
      if (m > 4 && std::abs(v) < 1e-18 * peak) {
        settled = true;
        break;
      }
    }
    if (!settled) throw ConvergenceError("Jackson sum did not settle within 400 terms");
    h = convolve(h, w);
  }
  cplx sum = 0.0;
  for (std::size_t s = 0; s < h.size(); ++s) {
    const cplx qs = ctx.qpow(static_cast<int>(s));
    cplx g = 1.0;
    for (int i = 0; i < p.M(); ++i)
      g *= qpoch_inf(p.b[i] * t[i] * qs, ctx) / qpoch_inf(t[i] * qs, ctx);
    sum += h[s] * g;
  }
  cplx pre = 1.0;
  for (int j = 0; j < p.N(); ++j) {
    pre *= qpoch_inf(p.a[j], ctx) * qpoch_inf(p.c[j] / p.a[j], ctx) /
           (qpoch_inf(p.c[j], ctx) * qpoch_inf(q, ctx));
  }
  ResidualReport rep;
  rep.lhs = eval_FNM(p, t, ctx).value;
  rep.rhs = pre * sum;
  rep.residual = rel_diff(rep.lhs, rep.rhs);
  return rep;
}

ResidualReport check_watson(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx) {
  const std::size_t n = upper.size();
  if (n != lower.size() + 1) throw ConfigError("need N+1 upper and N lower parameters");
  const cplx q = ctx.q();
  cplx z = q;
  for (cplx b : lower) z *= b;
  for (cplx a : upper) z /= a;
  z /= t;
  if (!(std::abs(t) < 1.0) || !(std::abs(z) < 1.0)) {
    std::ostringstream os;
    os << "Watson overlap needs |t| < 1 and |z| < 1 (|t| = " << std::abs(t)
       << ", |z| = " << std::abs(z) << ")";
    throw DomainError(os.str());
  }
  if (lattice_index(t, ctx)) throw DomainError("theta(t) vanishes on the q-lattice");
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k)
      if (auto e = lattice_index(upper[j] / upper[k], ctx)) {
        std::ostringstream os;
        os << "a" << j + 1 << "/a" << k + 1 << " = q^" << *e;
        throw ResonanceError(os.str());
      }

  const cplx th_t = theta(t, ctx);
  cplx rhs = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx ak = upper[k];
    cplx coef = theta(t * ak, ctx) / th_t;
    CVec up, lo;
    for (cplx b : lower) {
      coef *= qpoch_inf(b / ak, ctx) / qpoch_inf(b, ctx);
      up.push_back(q * ak / b);
    }
    up.push_back(ak);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      coef *= qpoch_inf(upper[j], ctx) / qpoch_inf(upper[j] / ak, ctx);
      lo.push_back(q * ak / upper[j]);
    }
    rhs += coef * direct_nphi(up, lo, z, ctx);
  }
  ResidualReport rep;
  rep.lhs = eval_nphi(upper, lower, t, ctx).value;
  rep.rhs = rhs;
  rep.residual = rel_diff(rep.lhs, rep.rhs);
  return rep;
}

cplx casorati_independence(const std::vector<Field>& funcs, const std::vector<int>& shift,
                           const CVec& t, const QContext& ctx, const PointFilter& admissible) {
  const int n = static_cast<int>(funcs.size());
  if (n == 0) return 1.0;
  if (shift.size() != t.size()) throw ConfigError("shift vector must have M entries");
  Eigen::MatrixXcd mat(n, n);
  for (int k = 0; k < n; ++k) {
    CVec pt = t;
    for (std::size_t i = 0; i < t.size(); ++i) pt[i] *= ctx.qpow(k * shift[i]);
    if (admissible && !admissible(pt)) {
      std::ostringstream os;
      os << "Casorati row " << k << " leaves the common domain";
      throw DomainError(os.str());
    }
    for (int j = 0; j < n; ++j) mat(k, j) = funcs[static_cast<std::size_t>(j)](pt);
  }
  for (int j = 0; j < n; ++j) {
    const double norm = mat.col(j).norm();
    if (norm == 0.0) return 0.0;
    mat.col(j) /= norm;
  }
  return mat.partialPivLu().determinant();
}

double exponent_vandermonde_score(const std::vector<CVec>& exponents,
                                  const std::vector<int>& shift, const QContext& ctx) {
  const int n = static_cast<int>(exponents.size());
  const cplx log_q = std::log(ctx.q());
  Eigen::MatrixXcd v(n, n);
  for (int j = 0; j < n; ++j) {
    cplx e = 0.0;
    for (std::size_t i = 0; i < shift.size(); ++i) e += static_cast<double>(shift[i]) * exponents[j][i];
    for (int k = 0; k < n; ++k) v(k, j) = std::exp(static_cast<double>(k) * e * log_q);
  }
  for (int j = 0; j < n; ++j) v.col(j) /= v.col(j).norm();
  return std::abs(v.partialPivLu().determinant());
}

std::optional<std::vector<int>> select_casorati_shift(const std::vector<CVec>& exponents,
                                                      const CVec& t, const QContext& ctx,
                                                      const PointFilter& admissible, int range) {
  const int M = static_cast<int>(t.size());
  const int n = static_cast<int>(exponents.size());
  std::vector<int> m(static_cast<std::size_t>(M), -range);
  std::optional<std::vector<int>> best;
  double best_score = -1.0;
  while (true) {
    bool zero = true;
    for (int v : m) zero = zero && v == 0;
    bool ok = !zero;
    for (int k = 1; ok && k < n; ++k) {
      CVec pt = t;
      for (int i = 0; i < M; ++i) pt[i] *= ctx.qpow(k * m[i]);
      if (admissible && !admissible(pt)) ok = false;
    }
    if (ok) {
      const double score = exponent_vandermonde_score(exponents, m, ctx);
      if (score > best_score) {
        best_score = score;
        best = m;
      }
    }
    int i = 0;
    while (i < M && m[i] == range) m[i++] = -range;
    if (i == M) break;
    ++m[i];
  }
  return best;
}

double exponent_equations_residual(const MultParams& p, int L, const CVec& delta,
                                   const QContext& ctx) {
  const int M = p.M();
  if (static_cast<int>(delta.size()) != M) throw ConfigError("delta must have M entries");
  const cplx q = ctx.q();
  cplx total = 0.0;
  for (cplx d : delta) total += d;
  const cplx qt = ctx.qpow(total);
  double worst = 0.0;
  for (int s = 1; s <= M; ++s) {
    cplx v = 1.0;
    const cplx qs = ctx.qpow(delta[s - 1]);
    if (s <= L) {
      for (cplx c : p.c) v *= 1.0 - c / q * qt;
      v *= 1.0 - qs;
    } else {
      for (cplx a : p.a) v *= 1.0 - a * qt;
      v *= 1.0 - p.b[s - 1] * qs;
    }
    worst = std::max(worst, std::abs(v));
  }
  for (int r = 1; r <= M; ++r)
    for (int s = r + 1; s <= M; ++s) {
      const cplx v = (1.0 - p.b[s - 1] * ctx.qpow(delta[s - 1])) * (1.0 - ctx.qpow(delta[r - 1]));
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

}  // namespace qconnect
