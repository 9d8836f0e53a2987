#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qconnect/errors.hpp"

namespace qconnect {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

struct QSettings {
  cplx q{0.3, 0.0};
  int prod_terms = 0;  // 0: derive from prod_cutoff
  double prod_cutoff = 1e-17;
  int series_cap = 80;
  double tail_tol = 1e-16;
  double cmp_tol = 1e-9;
  std::uint64_t seed = 0;
};

// Immutable numeric policy shared by every evaluation.
class QContext {
 public:
  explicit QContext(const QSettings& settings = {});

  cplx q() const { return q_; }
  int prod_terms() const { return prod_terms_; }
  int series_cap() const { return series_cap_; }
  double tail_tol() const { return tail_tol_; }
  double cmp_tol() const { return cmp_tol_; }
  std::uint64_t seed() const { return seed_; }
  const QSettings& settings() const { return settings_; }

  // q^k for integer k and q^alpha on the principal branch of log q.
  cplx qpow(int k) const;
  cplx qpow(cplx alpha) const;
  cplx qpow(double alpha) const { return qpow(cplx(alpha)); }

  // Same context with a different series cap or tolerance.
  QContext with_series_cap(int cap) const;
  QContext with_tail_tol(double tol) const;

 private:
  QSettings settings_;
  cplx q_;
  cplx log_q_;
  int prod_terms_;
  int series_cap_;
  double tail_tol_;
  double cmp_tol_;
  std::uint64_t seed_;
};

// Multiplicative series parameters a_j, b_i, c_j.
struct MultParams {
  CVec a, b, c;
  int N() const { return static_cast<int>(a.size()); }
  int M() const { return static_cast<int>(b.size()); }
};

class Permutation;

// Exponents alpha, beta, gamma together with a = q^alpha, b = q^beta, c = q^gamma.
struct ParamSet : MultParams {
  CVec alpha, beta, gamma;

  static ParamSet from_exponents(CVec alpha, CVec beta, CVec gamma, const QContext& ctx);

  // (b, beta) reindexed as b_{sigma(i)}; a and c untouched.
  ParamSet permuted(const Permutation& sigma) const;
};

// Bijection of {1..M}, stored by its images sigma(1..M).
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int M);
  // The adjacent transposition (r, r+1).
  static Permutation transposition(int M, int r);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const;
  const std::vector<int>& images() const { return images_; }

  // (*this)(other(i))
  Permutation compose(const Permutation& other) const;
  Permutation inverse() const;
  bool is_identity() const;
  std::string str() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

struct MultiIndex {
  std::vector<int> m;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries);
  int size() const { return static_cast<int>(m.size()); }
  int total() const;
};

cplx qpoch_inf(cplx a, const QContext& ctx);
cplx qpoch(cplx a, int m, const QContext& ctx);
cplx theta(cplx x, const QContext& ctx);
cplx cpow(cplx t, cplx alpha);

// sum_{i<=l} m_i - sum_{i>l} m_i
int mindex_nl(const MultiIndex& m, int l);
// Same, with index l+1 left out of both sums.
int mindex_nl_prime(const MultiIndex& m, int l);

// k with |x - q^k| < 1e-8 |q^k| and |k| <= 64, if any.
std::optional<int> lattice_index(cplx x, const QContext& ctx);
// min over |k| <= 64 of |x - q^k| / |q^k|.
double lattice_distance(cplx x, const QContext& ctx);

}  // namespace qconnect
