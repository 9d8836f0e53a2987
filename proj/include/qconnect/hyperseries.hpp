#pragma once

#include <string>
#include <vector>

#include "qconnect/qkernel.hpp"

namespace qconnect {

struct SeriesValue {
  cplx value{0.0};
  long terms_used = 0;
  double tail_estimate = 0.0;
};

// Component label: k == 0 is the distinguished component u_0, otherwise (k, l).
struct ComponentId {
  int k = 0;
  int l = 0;
  bool is_zero() const { return k == 0; }
  std::string str() const;
  friend bool operator==(const ComponentId&, const ComponentId&) = default;
};

// All N*M+1 labels in vector order (u_0, u_{1,1}, ..., u_{1,M}, u_{2,1}, ...).
std::vector<ComponentId> component_ids(int N, int M);
int component_index(const ComponentId& id, int M);

struct SolutionVector {
  int L = 0;
  Permutation sigma;
  CVec t;
  CVec components;
};

// A monomial bound |coeff * prod_i t_i^{exps_i}| < 1.
struct MonomialBound {
  cplx coeff;
  std::vector<int> exps;
  std::string label;
};

struct DomainSpec {
  int L = 0;
  Permutation sigma;
  std::vector<MonomialBound> bounds;

  static DomainSpec make(const MultParams& p, int L, const Permutation& sigma,
                         const QContext& ctx);
};

struct DomainCheck {
  bool inside = false;
  double margin = 0.0;  // min over bounds of 1 - |monomial|
};

DomainCheck in_domain(int L, const Permutation& sigma, const MultParams& p, const CVec& t,
                      const QContext& ctx);
DomainCheck in_domain(const DomainSpec& d, const CVec& t);

SeriesValue eval_FNM(const MultParams& p, const CVec& t, const QContext& ctx);
SeriesValue eval_nphi(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx);
SeriesValue eval_FNM_L(const MultParams& p, int L, const CVec& t, const QContext& ctx);
SeriesValue eval_FNM_Lkl(const MultParams& p, int L, int k, int l, const CVec& t,
                         const QContext& ctx);
SeriesValue eval_GNM_Lkl(const MultParams& p, int L, int k, int l, const CVec& t,
                         const QContext& ctx);

// Prefactored local solution component of u^{L,sigma} at t.
cplx local_solution(const ParamSet& p, int L, const Permutation& sigma, const ComponentId& which,
                    const CVec& t, const QContext& ctx, bool* branch_warning = nullptr);

SolutionVector build_solution_vector(const ParamSet& p, int L, const Permutation& sigma,
                                     const CVec& t, const QContext& ctx);

// |Arg t_i| < pi/4 for every i.
bool branch_safe(const CVec& t);

struct CharExponent {
  CVec delta;
};

// Leading exponents of the components of u^{L,sigma}, indexed by the variables t_1..t_M.
std::vector<CharExponent> char_exponents(const ParamSet& p, int L);
std::vector<CharExponent> char_exponents(const ParamSet& p, int L, const Permutation& sigma);

struct ResonanceViolation {
  std::string ratio;
  cplx value;
  int lattice_k = 0;
};

struct ResonanceReport {
  std::vector<ResonanceViolation> violations;
  // Smallest relative distance of any checked ratio from the q-lattice.
  double min_distance = 0.0;
  bool ok() const { return violations.empty(); }
};

ResonanceReport check_resonance(const MultParams& p, const Permutation& sigma,
                                const QContext& ctx);

}  // namespace qconnect
