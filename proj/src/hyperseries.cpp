#include "qconnect/hyperseries.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "series_engine.hpp"

namespace qconnect {

using detail::RatioTable;
using detail::shell_sum;
using detail::variable_table;

std::string ComponentId::str() const {
  if (k == 0) return "u0";
  std::ostringstream os;
  os << "u(" << k << "," << l << ")";
  return os.str();
}

std::vector<ComponentId> component_ids(int N, int M) {
  std::vector<ComponentId> ids{{0, 0}};
  for (int k = 1; k <= N; ++k)
    for (int l = 1; l <= M; ++l) ids.push_back({k, l});
  return ids;
}

int component_index(const ComponentId& id, int M) {
  return id.k == 0 ? 0 : 1 + (id.k - 1) * M + (id.l - 1);
}

namespace {

cplx prod_b(const CVec& b, int from, int to) {  // b_from..b_to, 1-based inclusive
  cplx r = 1.0;
  for (int i = from; i <= to; ++i) r *= b[static_cast<std::size_t>(i - 1)];
  return r;
}

cplx ratio_ca(const MultParams& p) {
  cplx r = 1.0;
  for (int j = 0; j < p.N(); ++j) r *= p.c[j] / p.a[j];
  return r;
}

void check_sizes(const MultParams& p, const CVec& t) {
  if (p.a.empty() || p.b.empty()) throw ConfigError("need N >= 1 and M >= 1");
  if (p.c.size() != p.a.size()) throw ConfigError("a and c must have equal length");
  if (static_cast<int>(t.size()) != p.M()) throw ConfigError("t must have M entries");
}

void check_lower(const CVec& lower, const QContext& ctx) {
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (auto k = lattice_index(lower[j], ctx); k && *k <= 0) {
      std::ostringstream os;
      os << "lower parameter " << j + 1 << " lies at q^" << *k;
      throw ResonanceError(os.str());
    }
  }
}

void require_domain(int L, const MultParams& p, const CVec& t, const QContext& ctx,
                    const char* what) {
  const auto d = in_domain(L, Permutation::identity(p.M()), p, t, ctx);
  if (!d.inside) {
    std::ostringstream os;
    os << what << ": point outside the convergence domain (margin " << d.margin << ")";
    throw DomainError(os.str());
  }
}

void require_index(bool ok, const char* what) {
  if (!ok) throw IndexError(what);
}

}  // namespace

DomainSpec DomainSpec::make(const MultParams& p, int L, const Permutation& sigma,
                            const QContext& ctx) {
  const int M = p.M();
  if (L < 0 || L > M) throw IndexError("L must lie in [0, M]");
  if (sigma.size() != M) throw IndexError("permutation size does not match M");
  DomainSpec d{L, sigma, {}};
  const cplx q = ctx.q();
  const cplx pq = ratio_ca(p) * q;
  auto unit = [M](int i, int v) {
    std::vector<int> e(static_cast<std::size_t>(M), 0);
    e[static_cast<std::size_t>(i)] = v;
    return e;
  };
  for (int i = 1; i <= M; ++i) {
    const int si = sigma(i) - 1;
    std::ostringstream os;
    if (i <= L) {
      os << "|t" << si + 1 << "| < 1";
      d.bounds.push_back({1.0, unit(si, 1), os.str()});
    } else {
      os << "|P q/(b" << si + 1 << " t" << si + 1 << ")| < 1";
      d.bounds.push_back({pq / p.b[si], unit(si, -1), os.str()});
    }
  }
  for (int i = 1; i <= M; ++i) {
    for (int j = i + 1; j <= M; ++j) {
      const int si = sigma(i) - 1, sj = sigma(j) - 1;
      auto e = unit(si, 1);
      e[static_cast<std::size_t>(sj)] = -1;
      std::ostringstream os;
      os << "|q t" << si + 1 << "/(b" << sj + 1 << " t" << sj + 1 << ")| < 1";
      d.bounds.push_back({q / p.b[sj], e, os.str()});
    }
  }
  return d;
}

DomainCheck in_domain(const DomainSpec& d, const CVec& t) {
  DomainCheck out{true, std::numeric_limits<double>::infinity()};
  for (const auto& b : d.bounds) {
    double mag = std::abs(b.coeff);
    for (std::size_t i = 0; i < b.exps.size(); ++i) {
      if (b.exps[i] != 0) mag *= std::pow(std::abs(t[i]), b.exps[i]);
    }
    if (!(mag < 1.0)) out.inside = false;
    out.margin = std::min(out.margin, 1.0 - mag);
  }
  return out;
}

DomainCheck in_domain(int L, const Permutation& sigma, const MultParams& p, const CVec& t,
                      const QContext& ctx) {
  if (static_cast<int>(t.size()) != p.M()) throw ConfigError("t must have M entries");
  return in_domain(DomainSpec::make(p, L, sigma, ctx), t);
}

SeriesValue eval_FNM(const MultParams& p, const CVec& t, const QContext& ctx) {
  check_sizes(p, t);
  for (cplx x : t)
    if (!(std::abs(x) < 1.0)) throw DomainError("F_{N,M} needs |t_i| < 1");
  check_lower(p.c, ctx);
  const int cap = ctx.series_cap();
  RatioTable coupling(p.a[0], p.c[0], 0, cap, ctx, "(a)/(c)");
  for (int j = 1; j < p.N(); ++j) coupling.scale_by(RatioTable(p.a[j], p.c[j], 0, cap, ctx, "(a)/(c)"));
  std::vector<std::vector<cplx>> var;
  for (int i = 0; i < p.M(); ++i) var.push_back(variable_table(p.b[i], t[i], cap, ctx));
  auto term = [&](const std::vector<int>& m) {
    int n = 0;
    cplx v = 1.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      n += m[i];
      v *= var[i][static_cast<std::size_t>(m[i])];
    }
    return v * coupling(n);
  };
  return shell_sum(p.M(), ctx, term, "F_{N,M}");
}

SeriesValue eval_nphi(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx) {
  if (upper.size() != lower.size() + 1) throw ConfigError("need N+1 upper and N lower parameters");
  if (!(std::abs(t) < 1.0)) throw DomainError("n+1 phi n needs |t| < 1");
  check_lower(lower, ctx);
  const int cap = ctx.series_cap();
  auto table = variable_table(upper.back(), t, cap, ctx);
  RatioTable coupling(1.0, 1.0, 0, cap, ctx, "");
  for (std::size_t j = 0; j < lower.size(); ++j)
    coupling.scale_by(RatioTable(upper[j], lower[j], 0, cap, ctx, "(a)/(c)"));
  auto term = [&](const std::vector<int>& m) {
    return coupling(m[0]) * table[static_cast<std::size_t>(m[0])];
  };
  return shell_sum(1, ctx, term, "n+1 phi n");
}

SeriesValue eval_FNM_L(const MultParams& p, int L, const CVec& t, const QContext& ctx) {
  check_sizes(p, t);
  const int M = p.M();
  require_index(L >= 0 && L <= M, "L must lie in [0, M]");
  const cplx q = ctx.q();
  const cplx P = ratio_ca(p);
  for (int i = 0; i < M; ++i) {
    const double v = i < L ? std::abs(t[i]) : std::abs(P * q / (p.b[i] * t[i]));
    if (!(v < 1.0)) throw DomainError("F^L: point outside the convergence set");
    if (i < L)
      for (int j = L; j < M; ++j)
        if (!(std::abs(q * t[i] / (p.b[j] * t[j])) < 1.0))
          throw DomainError("F^L: point outside the convergence set");
  }
  const int cap = ctx.series_cap();
  const cplx B = prod_b(p.b, L + 1, M);
  RatioTable coupling(1.0, 1.0, -cap, cap, ctx, "");
  for (int j = 0; j < p.N(); ++j)
    coupling.scale_by(RatioTable(p.a[j] / B, p.c[j] / B, -cap, cap, ctx, "(a/B)/(c/B)"));
  std::vector<std::vector<cplx>> var;
  for (int i = 0; i < M; ++i) {
    const cplx z = i < L ? t[i] : q / (p.b[i] * t[i]);
    var.push_back(variable_table(p.b[i], z, cap, ctx));
  }
  auto term = [&](const std::vector<int>& m) {
    int n = 0;
    cplx v = 1.0;
    for (int i = 0; i < M; ++i) {
      n += i < L ? m[i] : -m[i];
      v *= var[i][static_cast<std::size_t>(m[i])];
    }
    return v * coupling(n);
  };
  return shell_sum(M, ctx, term, "F^L");
}

SeriesValue eval_FNM_Lkl(const MultParams& p, int L, int k, int l, const CVec& t,
                         const QContext& ctx) {
  check_sizes(p, t);
  const int M = p.M(), N = p.N();
  require_index(L >= 0 && L < M, "F^{L;k,l} needs 0 <= L < M");
  require_index(k >= 1 && k <= N, "F^{L;k,l} needs 1 <= k <= N");
  require_index(l >= L + 1 && l <= M, "F^{L;k,l} needs L+1 <= l <= M");
  require_domain(L, p, t, ctx, "F^{L;k,l}");
  const int cap = ctx.series_cap();
  const cplx q = ctx.q();
  const cplx ak = p.a[k - 1];
  const cplx bt = p.b[l - 1] * t[l - 1];

  // slot s holds the table for the 0-based summation index m_{s+1}
  std::vector<std::vector<cplx>> slot(static_cast<std::size_t>(M));
  RatioTable lead(1.0, 1.0, 0, cap, ctx, "");
  for (int j = 0; j < N; ++j)
    lead.scale_by(RatioTable(q * ak / p.c[j], q * ak / p.a[j], 0, cap, ctx, "(qa_k/c)/(qa_k/a)"));
  {
    const cplx w = ratio_ca(p) * q / bt;
    std::vector<cplx> v(static_cast<std::size_t>(cap + 1));
    cplx wn = 1.0;
    for (int n = 0; n <= cap; ++n, wn *= w) v[static_cast<std::size_t>(n)] = lead(n) * wn;
    slot[static_cast<std::size_t>(L)] = std::move(v);
  }
  for (int i = 1; i <= L; ++i)
    slot[i - 1] = variable_table(p.b[i - 1], q * t[i - 1] / bt, cap, ctx);
  for (int i = L + 1; i <= l - 1; ++i)
    slot[i] = variable_table(p.b[i - 1], q * t[i - 1] / bt, cap, ctx);
  for (int i = l + 1; i <= M; ++i)
    slot[i - 1] = variable_table(p.b[i - 1], bt / (p.b[i - 1] * t[i - 1]), cap, ctx);

  const RatioTable tail(ak / prod_b(p.b, l + 1, M), q * ak / prod_b(p.b, l, M), -cap, cap, ctx,
                        "(a_k/B_{l+1})/(q a_k/B_l)");
  auto term = [&](const std::vector<int>& m) {
    int n = 0;
    cplx v = 1.0;
    for (int s = 0; s < M; ++s) {
      n += s < l ? m[s] : -m[s];
      v *= slot[s][static_cast<std::size_t>(m[s])];
    }
    return v * tail(n);
  };
  return shell_sum(M, ctx, term, "F^{L;k,l}");
}

SeriesValue eval_GNM_Lkl(const MultParams& p, int L, int k, int l, const CVec& t,
                         const QContext& ctx) {
  check_sizes(p, t);
  const int M = p.M(), N = p.N();
  require_index(L >= 1 && L <= M, "G^{L;k,l} needs 1 <= L <= M");
  require_index(k >= 1 && k <= N, "G^{L;k,l} needs 1 <= k <= N");
  require_index(l >= 1 && l <= L, "G^{L;k,l} needs 1 <= l <= L");
  require_domain(L, p, t, ctx, "G^{L;k,l}");
  const int cap = ctx.series_cap();
  const cplx q = ctx.q();
  const cplx ck = p.c[k - 1];
  const cplx bt = p.b[l - 1] * t[l - 1];

  std::vector<std::vector<cplx>> slot(static_cast<std::size_t>(M));
  RatioTable lead(1.0, 1.0, 0, cap, ctx, "");
  for (int j = 0; j < N; ++j)
    lead.scale_by(RatioTable(q * p.a[j] / ck, q * p.c[j] / ck, 0, cap, ctx, "(qa/c_k)/(qc/c_k)"));
  {
    const cplx w = bt / q;
    std::vector<cplx> v(static_cast<std::size_t>(cap + 1));
    cplx wn = 1.0;
    for (int n = 0; n <= cap; ++n, wn *= w) v[static_cast<std::size_t>(n)] = lead(n) * wn;
    slot[static_cast<std::size_t>(L - 1)] = std::move(v);
  }
  for (int i = 1; i < l; ++i)
    slot[i - 1] = variable_table(p.b[i - 1], q * t[i - 1] / bt, cap, ctx);
  for (int i = l + 1; i <= L; ++i)
    slot[i - 2] = variable_table(p.b[i - 1], bt / (p.b[i - 1] * t[i - 1]), cap, ctx);
  for (int i = L + 1; i <= M; ++i)
    slot[i - 1] = variable_table(p.b[i - 1], bt / (p.b[i - 1] * t[i - 1]), cap, ctx);

  const RatioTable tail(ck / (q * prod_b(p.b, l + 1, M)), ck / prod_b(p.b, l, M), -cap, cap, ctx,
                        "(c_k/qB_{l+1})/(c_k/B_l)");
  auto term = [&](const std::vector<int>& m) {
    int n = 0;
    cplx v = 1.0;
    for (int s = 0; s < M; ++s) {
      n += s < l - 1 ? m[s] : -m[s];
      v *= slot[s][static_cast<std::size_t>(m[s])];
    }
    return v * tail(n);
  };
  return shell_sum(M, ctx, term, "G^{L;k,l}");
}

bool branch_safe(const CVec& t) {
  for (cplx x : t)
    if (x == 0.0 || !(std::abs(std::arg(x)) < std::numbers::pi / 4)) return false;
  return true;
}

cplx local_solution(const ParamSet& p, int L, const Permutation& sigma, const ComponentId& which,
                    const CVec& t, const QContext& ctx, bool* branch_warning) {
  const int M = p.M(), N = p.N();
  if (static_cast<int>(t.size()) != M) throw ConfigError("t must have M entries");
  require_index(L >= 0 && L <= M, "L must lie in [0, M]");
  if (!which.is_zero())
    require_index(which.k >= 1 && which.k <= N && which.l >= 1 && which.l <= M,
                  "component (k,l) out of range");
  const ParamSet ps = p.permuted(sigma);
  CVec ts(static_cast<std::size_t>(M));
  for (int i = 1; i <= M; ++i) ts[i - 1] = t[sigma(i) - 1];
  if (branch_warning) *branch_warning = !branch_safe(t);

  if (which.is_zero()) {
    cplx pre = 1.0;
    for (int i = L + 1; i <= M; ++i) pre *= cpow(ts[i - 1], -ps.beta[i - 1]);
    return pre * eval_FNM_L(ps, L, ts, ctx).value;
  }
  const int k = which.k, l = which.l;
  cplx pre = 1.0, tail_beta = 0.0;
  for (int i = l + 1; i <= M; ++i) {
    pre *= cpow(ts[i - 1], -ps.beta[i - 1]);
    tail_beta += ps.beta[i - 1];
  }
  if (l <= L) {
    pre *= cpow(ts[l - 1], 1.0 + tail_beta - ps.gamma[k - 1]);
    return pre * eval_GNM_Lkl(ps, L, k, l, ts, ctx).value;
  }
  pre *= cpow(ts[l - 1], -ps.alpha[k - 1] + tail_beta);
  return pre * eval_FNM_Lkl(ps, L, k, l, ts, ctx).value;
}

SolutionVector build_solution_vector(const ParamSet& p, int L, const Permutation& sigma,
                                     const CVec& t, const QContext& ctx) {
  SolutionVector out{L, sigma, t, {}};
  for (const auto& id : component_ids(p.N(), p.M())) {
    try {
      out.components.push_back(local_solution(p, L, sigma, id, t, ctx));
    } catch (const QError& e) {
      throw_error(e.kind(), "component " + id.str() + ": " + e.what());
    }
  }
  return out;
}

std::vector<CharExponent> char_exponents(const ParamSet& p, int L) {
  return char_exponents(p, L, Permutation::identity(p.M()));
}

std::vector<CharExponent> char_exponents(const ParamSet& p, int L, const Permutation& sigma) {
  const int M = p.M();
  require_index(L >= 0 && L <= M, "L must lie in [0, M]");
  const ParamSet ps = p.permuted(sigma);
  std::vector<CharExponent> out;
  for (const auto& id : component_ids(p.N(), M)) {
    CVec d(static_cast<std::size_t>(M), 0.0);
    if (id.is_zero()) {
      for (int i = L + 1; i <= M; ++i) d[i - 1] = -ps.beta[i - 1];
    } else {
      cplx tail_beta = 0.0;
      for (int i = id.l + 1; i <= M; ++i) {
        d[i - 1] = -ps.beta[i - 1];
        tail_beta += ps.beta[i - 1];
      }
      d[id.l - 1] = id.l <= L ? 1.0 + tail_beta - ps.gamma[id.k - 1]
                              : -ps.alpha[id.k - 1] + tail_beta;
    }
    CVec in_t(static_cast<std::size_t>(M));
    for (int i = 1; i <= M; ++i) in_t[sigma(i) - 1] = d[i - 1];
    out.push_back({std::move(in_t)});
  }
  return out;
}

ResonanceReport check_resonance(const MultParams& p, const Permutation& sigma,
                                const QContext& ctx) {
  ResonanceReport rep;
  rep.min_distance = std::numeric_limits<double>::infinity();
  auto check = [&](const std::string& name, cplx v) {
    rep.min_distance = std::min(rep.min_distance, lattice_distance(v, ctx));
    if (auto k = lattice_index(v, ctx)) rep.violations.push_back({name, v, *k});
  };
  const int N = p.N(), M = p.M();
  for (int j = 0; j < N; ++j) {
    for (int k = j + 1; k < N; ++k) {
      check("a" + std::to_string(j + 1) + "/a" + std::to_string(k + 1), p.a[j] / p.a[k]);
      check("c" + std::to_string(j + 1) + "/c" + std::to_string(k + 1), p.c[j] / p.c[k]);
    }
  }
  for (int i = 1; i <= M + 1; ++i) {
    cplx B = 1.0;
    std::string bname;
    for (int s = i; s <= M; ++s) {
      B *= p.b[sigma(s) - 1];
      bname += "b" + std::to_string(sigma(s));
    }
    const std::string den = bname.empty() ? "" : "/(" + bname + ")";
    for (int j = 0; j < N; ++j) {
      check("a" + std::to_string(j + 1) + den, p.a[j] / B);
      check("c" + std::to_string(j + 1) + den, p.c[j] / B);
    }
  }
  return rep;
}

}  // namespace qconnect
