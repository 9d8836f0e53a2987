#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qconnect/hyperseries.hpp"

namespace qconnect {

enum class ConnKind { A, B, S, Product };

struct ConnMatrix {
  ConnKind kind = ConnKind::Product;
  int L = 0;
  Permutation sigma;
  std::optional<int> r;
  Eigen::MatrixXcd entries;
  CVec eval_point;

  std::string label() const;
};

// u^{L,sigma} = A u^{L+1,sigma}, entries in t_{sigma(L+1)}.
ConnMatrix build_A(const ParamSet& p, int L, const Permutation& sigma, const CVec& t,
                   const QContext& ctx);
// u^{L,sigma} = B u^{L-1,sigma}, entries in t_{sigma(L)}.
ConnMatrix build_B(const ParamSet& p, int L, const Permutation& sigma, const CVec& t,
                   const QContext& ctx);
// u^{M,sigma.s_r} = S u^{M,sigma}, entries in t_{sigma(r)}/t_{sigma(r+1)}.
ConnMatrix build_S(const ParamSet& p, int r, const Permutation& sigma, const CVec& t,
                   const QContext& ctx);

// Adjacent-transposition word (r_1, ..., r_I) with
// sigma2 = sigma1 . s_{r_I} . ... . s_{r_1}, found by bubble sort.
std::vector<int> default_word(const Permutation& sigma1, const Permutation& sigma2);
// sigma . s_{r_I} . ... . s_{r_1}
Permutation apply_word(const Permutation& sigma, const std::vector<int>& word);

// C with u^{L2,sigma2} = C u^{L1,sigma1}: up through B factors to L = M, along
// the S chain of the word, then down through A factors.
ConnMatrix compose_connection(const ParamSet& p, int L1, const Permutation& sigma1, int L2,
                              const Permutation& sigma2, const std::vector<int>& word,
                              const CVec& t, const QContext& ctx);
ConnMatrix compose_connection(const ParamSet& p, int L1, const Permutation& sigma1, int L2,
                              const Permutation& sigma2, const CVec& t, const QContext& ctx);

// max_i |lhs_i - (C rhs)_i| / max_i |lhs_i|
double verify_connection(const SolutionVector& lhs, const ConnMatrix& C, const SolutionVector& rhs,
                         const QContext& ctx);

// Largest entrywise relative change of the matrix when rebuilt at t with
// t_s replaced by q t_s.
double pseudo_constancy_defect(const ConnMatrix& m, const ParamSet& p, int s,
                               const QContext& ctx);

}  // namespace qconnect
