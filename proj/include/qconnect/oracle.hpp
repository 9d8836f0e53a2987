#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qconnect/qkernel.hpp"

namespace qconnect {

// A function of the M variables t_1..t_M.
using Field = std::function<cplx(const CVec&)>;

// Relative residual of the first-order system equation for index s (1-based).
double residual_eqn1(const Field& f, const MultParams& p, int s, const CVec& t,
                     const QContext& ctx);
// Relative residual of the mixed equation for 1 <= r < s <= M.
double residual_eqn2(const Field& f, const MultParams& p, int r, int s, const CVec& t,
                     const QContext& ctx);

// prod_j (1 - coeffs_j T) applied to f at t, with T the shift of every variable by q.
cplx apply_total_shift_product(const Field& f, const CVec& coeffs, const CVec& t,
                               const QContext& ctx);

struct ResidualReport {
  cplx lhs{0.0};
  cplx rhs{0.0};
  double residual = 0.0;
};

// Compares F_{N,M} with the prefactored F_{M,N} of swapped parameter roles.
ResidualReport check_duality(const MultParams& p, const CVec& t, const QContext& ctx);
// Compares F_{N,M} with its N-fold Jackson integral; uses the exponents alpha.
ResidualReport check_jackson(const ParamSet& p, const CVec& t, const QContext& ctx);
// Compares n+1 phi n at t with the (N+1)-term expansion around infinity.
ResidualReport check_watson(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx);

// Oracle-side summations, written without the series module.
cplx direct_nphi(const CVec& upper, const CVec& lower, cplx t, const QContext& ctx);
cplx direct_FNM(const MultParams& p, const CVec& t, const QContext& ctx);

// Point predicate used to reject shifted points outside a common domain.
using PointFilter = std::function<bool(const CVec&)>;

// Determinant of [R^k f_j(t)]_{k,j}, R = prod_i T_i^{shift_i}, divided by the
// product of the column 2-norms.
cplx casorati_independence(const std::vector<Field>& funcs, const std::vector<int>& shift,
                           const CVec& t, const QContext& ctx,
                           const PointFilter& admissible = nullptr);

// Shift vector in [-range, range]^M whose exponent Vandermonde matrix
// [q^{k (shift, delta_j)}] is best conditioned, among shifts whose points
// R^k t all pass the filter.
std::optional<std::vector<int>> select_casorati_shift(const std::vector<CVec>& exponents,
                                                      const CVec& t, const QContext& ctx,
                                                      const PointFilter& admissible = nullptr,
                                                      int range = 3);

// |det V| / prod ||V column|| for V_{kj} = q^{k (shift, delta_j)}.
double exponent_vandermonde_score(const std::vector<CVec>& exponents,
                                  const std::vector<int>& shift, const QContext& ctx);

// max over the defining product equations of |value| when t^delta is substituted.
double exponent_equations_residual(const MultParams& p, int L, const CVec& delta,
                                   const QContext& ctx);

}  // namespace qconnect
