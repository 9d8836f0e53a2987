#include "qconnect/qkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qconnect {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Pole: return "PoleError";
    case ErrorKind::Resonance: return "ResonanceError";
    case ErrorKind::Convergence: return "ConvergenceError";
    case ErrorKind::Index: return "IndexError";
    case ErrorKind::Word: return "WordError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::IO: return "IOError";
  }
  return "QError";
}

void throw_error(ErrorKind kind, const std::string& what) {
  switch (kind) {
    case ErrorKind::Domain: throw DomainError(what);
    case ErrorKind::Pole: throw PoleError(what);
    case ErrorKind::Resonance: throw ResonanceError(what);
    case ErrorKind::Convergence: throw ConvergenceError(what);
    case ErrorKind::Index: throw IndexError(what);
    case ErrorKind::Word: throw WordError(what);
    case ErrorKind::Config: throw ConfigError(what);
    case ErrorKind::IO: throw IOError(what);
  }
  throw QError(kind, what);
}

QContext::QContext(const QSettings& s)
    : settings_(s), q_(s.q), series_cap_(s.series_cap), tail_tol_(s.tail_tol),
      cmp_tol_(s.cmp_tol), seed_(s.seed) {
  const double aq = std::abs(q_);
  if (!(aq > 0.0 && aq < 1.0)) {
    std::ostringstream os;
    os << "base q must satisfy 0 < |q| < 1, got " << q_;
    throw DomainError(os.str());
  }
  if (!(tail_tol_ > 0.0) || !(cmp_tol_ > 0.0) || !(s.prod_cutoff > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (series_cap_ < 1) throw ConfigError("series_cap must be positive");
  if (s.prod_terms > 0) {
    prod_terms_ = s.prod_terms;
  } else {
    prod_terms_ = static_cast<int>(std::ceil(std::log(s.prod_cutoff) / std::log(aq)));
    if (std::pow(aq, prod_terms_) >= s.prod_cutoff) ++prod_terms_;
    prod_terms_ = std::max(prod_terms_, 1);
  }
  if (std::pow(aq, prod_terms_) >= tail_tol_) {
    throw ConfigError("prod_terms too small: |q|^prod_terms must be below tail_tol");
  }
  log_q_ = std::log(q_);
}

cplx QContext::qpow(int k) const {
  if (q_.imag() == 0.0 && q_.real() > 0.0) return {std::pow(q_.real(), k), 0.0};
  return std::exp(static_cast<double>(k) * log_q_);
}

cplx QContext::qpow(cplx alpha) const { return std::exp(alpha * log_q_); }

QContext QContext::with_series_cap(int cap) const {
  QSettings s = settings_;
  s.series_cap = cap;
  s.prod_terms = prod_terms_;
  return QContext(s);
}

QContext QContext::with_tail_tol(double tol) const {
  QSettings s = settings_;
  s.tail_tol = tol;
  s.prod_terms = prod_terms_;
  return QContext(s);
}

ParamSet ParamSet::from_exponents(CVec alpha, CVec beta, CVec gamma, const QContext& ctx) {
  if (alpha.empty() || beta.empty()) throw ConfigError("need N >= 1 and M >= 1");
  if (gamma.size() != alpha.size()) throw ConfigError("alpha and gamma must have equal length");
  ParamSet p;
  p.alpha = std::move(alpha);
  p.beta = std::move(beta);
  p.gamma = std::move(gamma);
  for (cplx x : p.alpha) p.a.push_back(ctx.qpow(x));
  for (cplx x : p.beta) p.b.push_back(ctx.qpow(x));
  for (cplx x : p.gamma) p.c.push_back(ctx.qpow(x));
  for (std::size_t j = 0; j < p.c.size(); ++j) {
    auto k = lattice_index(p.c[j], ctx);
    if (k && *k <= 0) {
      std::ostringstream os;
      os << "c_" << j + 1 << " = q^" << *k << " is a lower-parameter pole";
      throw ResonanceError(os.str());
    }
  }
  return p;
}

ParamSet ParamSet::permuted(const Permutation& sigma) const {
  if (sigma.size() != M()) throw IndexError("permutation size does not match M");
  ParamSet out = *this;
  for (int i = 1; i <= M(); ++i) {
    out.b[i - 1] = b[sigma(i) - 1];
    out.beta[i - 1] = beta[sigma(i) - 1];
  }
  return out;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<int> seen(images_.size() + 1, 0);
  for (int v : images_) {
    if (v < 1 || v > size() || seen[v]++) throw IndexError("not a permutation of {1..M}");
  }
}

Permutation Permutation::identity(int M) {
  std::vector<int> im(M);
  std::iota(im.begin(), im.end(), 1);
  return Permutation(std::move(im));
}

Permutation Permutation::transposition(int M, int r) {
  if (r < 1 || r >= M) throw IndexError("transposition index out of range");
  auto p = identity(M);
  std::swap(p.images_[r - 1], p.images_[r]);
  return p;
}

int Permutation::operator()(int i) const {
  if (i < 1 || i > size()) throw IndexError("permutation argument out of range");
  return images_[i - 1];
}

Permutation Permutation::compose(const Permutation& other) const {
  if (other.size() != size()) throw IndexError("composing permutations of different sizes");
  std::vector<int> im(size());
  for (int i = 1; i <= size(); ++i) im[i - 1] = (*this)(other(i));
  return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
  std::vector<int> im(size());
  for (int i = 1; i <= size(); ++i) im[images_[i - 1] - 1] = i;
  return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
  for (int i = 0; i < size(); ++i)
    if (images_[i] != i + 1) return false;
  return true;
}

std::string Permutation::str() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < size(); ++i) os << (i ? "," : "") << images_[i];
  os << ']';
  return os.str();
}

MultiIndex::MultiIndex(std::vector<int> entries) : m(std::move(entries)) {
  for (int v : m)
    if (v < 0) throw IndexError("multi-index entries must be nonnegative");
}

int MultiIndex::total() const { return std::accumulate(m.begin(), m.end(), 0); }

cplx qpoch_inf(cplx a, const QContext& ctx) {
  cplx r = 1.0, x = a;
  const cplx q = ctx.q();
  for (int k = 0; k < ctx.prod_terms(); ++k) {
    r *= 1.0 - x;
    x *= q;
  }
  return r;
}

cplx qpoch(cplx a, int m, const QContext& ctx) {
  cplx r = 1.0;
  if (m >= 0) {
    cplx x = a;
    for (int k = 0; k < m; ++k) {
      r *= 1.0 - x;
      x *= ctx.q();
    }
    return r;
  }
  if (auto k = lattice_index(a, ctx); k && *k >= 1 && *k <= -m) {
    std::ostringstream os;
    os << "(a)_" << m << " has a pole: a = q^" << *k;
    throw PoleError(os.str());
  }
  for (int k = m; k < 0; ++k) {
    cplx f = 1.0 - a * ctx.qpow(k);
    if (f == 0.0) throw PoleError("negative-index q-Pochhammer pole");
    r /= f;
  }
  return r;
}

cplx theta(cplx x, const QContext& ctx) {
  if (x == 0.0) throw DomainError("theta(0) is undefined");
  return qpoch_inf(x, ctx) * qpoch_inf(ctx.q() / x, ctx);
}

cplx cpow(cplx t, cplx alpha) {
  if (t == 0.0) {
    if (alpha.real() > 0.0) return 0.0;
    throw DomainError("cpow(0, alpha) with Re alpha <= 0");
  }
  if (alpha == 0.0) return 1.0;
  return std::exp(alpha * std::log(t));
}

int mindex_nl(const MultiIndex& m, int l) {
  if (l < 0 || l > m.size()) throw IndexError("m(l) needs 0 <= l <= M");
  int s = 0;
  for (int i = 0; i < m.size(); ++i) s += (i < l) ? m.m[i] : -m.m[i];
  return s;
}

int mindex_nl_prime(const MultiIndex& m, int l) {
  if (l < 0 || l > m.size()) throw IndexError("m(l)' needs 0 <= l <= M");
  int s = 0;
  for (int i = 0; i < m.size(); ++i) {
    if (i == l) continue;  // 0-based slot of index l+1
    s += (i < l) ? m.m[i] : -m.m[i];
  }
  return s;
}

double lattice_distance(cplx x, const QContext& ctx) {
  if (x == 0.0) return 1.0;
  const double lq = std::log(std::abs(ctx.q()));
  const int k0 = static_cast<int>(std::lround(std::log(std::abs(x)) / lq));
  double best = std::numeric_limits<double>::infinity();
  for (int k = k0 - 1; k <= k0 + 1; ++k) {
    if (k < -64 || k > 64) continue;
    const cplx qk = ctx.qpow(k);
    best = std::min(best, std::abs(x - qk) / std::abs(qk));
  }
  return best;
}

std::optional<int> lattice_index(cplx x, const QContext& ctx) {
  if (x == 0.0) return std::nullopt;
  const double lq = std::log(std::abs(ctx.q()));
  const int k0 = static_cast<int>(std::lround(std::log(std::abs(x)) / lq));
  for (int k = k0 - 1; k <= k0 + 1; ++k) {
    if (k < -64 || k > 64) continue;
    const cplx qk = ctx.qpow(k);
    if (std::abs(x - qk) < 1e-8 * std::abs(qk)) return k;
  }
  return std::nullopt;
}

}  // namespace qconnect
