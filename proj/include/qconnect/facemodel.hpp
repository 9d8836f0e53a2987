#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "qconnect/connection.hpp"

namespace qconnect {

// 2x2 Boltzmann-weight matrix with the labels it was built from.
struct FaceWeight2x2 {
  std::string kind;  // "Wtilde", "W", "Wprime"
  cplx first{0.0};   // alpha, or the multiplicative height a
  cplx second{0.0};  // beta, or the multiplicative unit
  cplx x{1.0};       // multiplicative spectral argument
  Eigen::Matrix2cd w;
};

// Block-diagonal (1, S~^1, ..., S~^N) with (b, beta) reindexed by sigma and
// every block evaluated at t_r / t_{r+1} = ratio.
ConnMatrix build_Stilde(const ParamSet& p, int r, const Permutation& sigma, cplx ratio,
                        const QContext& ctx);

// The six factors of the braid relation for S~_r, S~_{r+1}:
//   lhs = S~_r(b.s_r.s_{r+1}; u) S~_{r+1}(b.s_r; uv) S~_r(b; v)
//   rhs = S~_{r+1}(b.s_{r+1}.s_r; v) S~_r(b.s_{r+1}; uv) S~_{r+1}(b; u)
struct YbeFactors {
  std::array<Eigen::MatrixXcd, 3> lhs;
  std::array<Eigen::MatrixXcd, 3> rhs;
};
YbeFactors ybe_factors(const ParamSet& p, int r, cplx u, cplx v, const QContext& ctx);
// max |lhs - rhs| / max |lhs| of the two triple products.
double ybe_residual(const YbeFactors& f);
double ybe_residual(const ParamSet& p, int r, cplx u, cplx v, const QContext& ctx);

FaceWeight2x2 build_Wtilde(cplx alpha, cplx beta, cplx u, const QContext& ctx);
FaceWeight2x2 build_W_akm(cplx alpha, cplx beta, cplx u, const QContext& ctx);

// Diagonal entry f(alpha, beta) of the conjugating matrices diag(1, f), diag(f, 1).
cplx conjugation_factor(cplx alpha, cplx beta, const QContext& ctx);

struct ConjugacyResiduals {
  double via_A = 0.0;        // W vs A^{-1} W~ A
  double via_B = 0.0;        // W vs B W~ B^{-1}
  double commutator = 0.0;   // (AB) W vs W (AB)
};
// f_override replaces f(alpha, beta) in A and B (negative control).
ConjugacyResiduals conjugacy_residuals(cplx alpha, cplx beta, cplx u, const QContext& ctx,
                                       std::optional<cplx> f_override = std::nullopt);

// theta_1 in the multiplicative argument x = e^{2iz}:
// q^{1/8} (x^{1/2} - x^{-1/2}) / i * (qx, q/x, q)_inf, principal square root.
cplx bracket(cplx x, const QContext& ctx);

// [a-u]/[a], [u][a+1][a-1]/([1][a]^2), [u]/[1], [a+u]/[a] on multiplicative
// arguments a_mult, u_mult, unit_mult.
FaceWeight2x2 build_Wprime(cplx a_mult, cplx u_mult, cplx unit_mult, const QContext& ctx);

// Relation between W' and W(alpha, beta; x) through the diagonal gauge
// diag(x^{(alpha+3beta)/2}, x^{-(alpha+beta)/2}) and the prefactor x^{1/2}.
struct GaugeResiduals {
  double literal = 0.0;    // gauge as stated
  double corrected = 0.0;  // after the extra similarity diag(1, q^{-(beta+1)/2})
  cplx offdiag_ratio_01{1.0};  // (gauged W')_{01} / (scaled W)_{01}
  cplx offdiag_ratio_10{1.0};
};
GaugeResiduals gauge_residuals(cplx alpha, cplx beta, cplx x, const QContext& ctx);

// Which exponent the AKM chain uses at site i.
enum class AkmShift { Plus, Minus };  // alpha' + (i-1) beta'  or  alpha' - (i-1) beta'

// n x n matrix with W(alpha_i, beta'; u) on rows/columns i, i+1 (1-based).
Eigen::MatrixXcd akm_P(cplx alpha_p, cplx beta_p, int n, int i, cplx u, AkmShift rule,
                       const QContext& ctx);
// P_i(u) P_{i+1}(uv) P_i(v) against P_{i+1}(v) P_i(uv) P_{i+1}(u), relative.
double akm_ybe_residual(cplx alpha_p, cplx beta_p, int n, int i, cplx u, cplx v, AkmShift rule,
                        const QContext& ctx);

// Same braid relation for W' blocks dressed by the stated gauge:
// u^{1/2} D W'(a_i) D theta(q^{-beta'}) / theta(u q^{-beta'}), a_i = q^{-alpha_i - 2 beta'}.
Eigen::MatrixXcd wprime_P(cplx alpha_p, cplx beta_p, int n, int i, cplx u, const QContext& ctx);
double wprime_ybe_residual(cplx alpha_p, cplx beta_p, int n, int i, cplx u, cplx v,
                           const QContext& ctx);

}  // namespace qconnect
