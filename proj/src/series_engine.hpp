#pragma once

// Shell-by-shell multi-index summation and the lookup tables the series
// kernels are assembled from. Private to the series module.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qconnect/hyperseries.hpp"

namespace qconnect::detail {

// (x)_n / (y)_n for lo <= n <= hi, built by stepping away from n = 0 so that
// negative indices never form the two (underflowing) products separately.
class RatioTable {
 public:
  RatioTable(cplx x, cplx y, int lo, int hi, const QContext& ctx, const char* label)
      : lo_(lo), v_(static_cast<std::size_t>(hi - lo + 1), cplx(1.0)) {
    if (x == y) return;
    const cplx q = ctx.q();
    cplx r = 1.0, xq = x, yq = y;
    for (int n = 0; n < hi; ++n) {
      const cplx den = 1.0 - yq;
      if (std::abs(den) < 1e-13) fail(label, y);
      r *= (1.0 - xq) / den;
      at(n + 1) = r;
      xq *= q;
      yq *= q;
    }
    r = 1.0;
    xq = x / q;
    yq = y / q;
    for (int n = 0; n > lo; --n) {
      const cplx den = 1.0 - xq;
      if (std::abs(den) < 1e-13) fail(label, x);
      r *= (1.0 - yq) / den;
      at(n - 1) = r;
      xq /= q;
      yq /= q;
    }
  }

  cplx operator()(int n) const { return v_[static_cast<std::size_t>(n - lo_)]; }

  void scale_by(const RatioTable& other) {
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] *= other.v_[i];
  }

 private:
  cplx& at(int n) { return v_[static_cast<std::size_t>(n - lo_)]; }

  [[noreturn]] static void fail(const char* label, cplx v) {
    std::ostringstream os;
    os << "q-Pochhammer ratio " << label << " hits a pole (parameter " << v << ")";
    throw ResonanceError(os.str());
  }

  int lo_;
  std::vector<cplx> v_;
};

// (b)_n / (q)_n * z^n for 0 <= n <= hi.
inline std::vector<cplx> variable_table(cplx b, cplx z, int hi, const QContext& ctx) {
  std::vector<cplx> v(static_cast<std::size_t>(hi + 1));
  const cplx q = ctx.q();
  cplx r = 1.0, bq = b, qq = q;
  v[0] = 1.0;
  for (int n = 1; n <= hi; ++n) {
    r *= (1.0 - bq) / (1.0 - qq) * z;
    v[static_cast<std::size_t>(n)] = r;
    bq *= q;
    qq *= q;
  }
  return v;
}

template <class F>
void for_each_composition(int s, std::vector<int>& m, int pos, F& f) {
  const int dim = static_cast<int>(m.size());
  if (pos == dim - 1) {
    m[static_cast<std::size_t>(pos)] = s;
    f();
    return;
  }
  for (int v = 0; v <= s; ++v) {
    m[static_cast<std::size_t>(pos)] = v;
    for_each_composition(s - v, m, pos + 1, f);
  }
}

// Sums term(m) over m in N^dim shell by shell (|m| = s) and stops once three
// consecutive shells carry less than tail_tol of the running magnitude.
template <class Term>
SeriesValue shell_sum(int dim, const QContext& ctx, Term&& term, const char* what) {
  std::vector<int> m(static_cast<std::size_t>(dim), 0);
  cplx total = 0.0;
  double running = 0.0;
  int quiet = 0;
  long terms = 0;
  double recent[3] = {0.0, 0.0, 0.0};
  const double tol = ctx.tail_tol();
  double last_rel = 0.0;
  for (int s = 0; s <= ctx.series_cap(); ++s) {
    cplx shell = 0.0;
    double shell_abs = 0.0;
    auto visit = [&] {
      const cplx v = term(m);
      shell += v;
      shell_abs += std::abs(v);
      ++terms;
    };
    for_each_composition(s, m, 0, visit);
    total += shell;
    running = std::max(running, std::abs(total));
    if (!std::isfinite(shell_abs)) {
      throw ConvergenceError(std::string(what) + ": non-finite terms");
    }
    if (s == 0) continue;
    last_rel = running > 0.0 ? shell_abs / running
                             : (shell_abs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    recent[s % 3] = last_rel;
    quiet = last_rel < tol ? quiet + 1 : 0;
    if (quiet >= 3) {
      return {total, terms, std::max({recent[0], recent[1], recent[2]})};
    }
  }
  std::ostringstream os;
  os << what << ": no convergence within " << ctx.series_cap()
     << " shells (last shell ratio " << last_rel << ")";
  throw ConvergenceError(os.str());
}

}  // namespace qconnect::detail
