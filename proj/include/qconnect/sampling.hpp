#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "qconnect/hyperseries.hpp"

namespace qconnect {

// Deterministic generator plus the few draws the samplers need.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform();  // [0, 1), 53 bits
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int below(int n);  // [0, n)
  std::uint64_t next() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// FNV-1a over a byte string; used for seed derivation and parameter digests.
std::uint64_t fnv1a(const std::string& s);

struct ParamRequest {
  int N = 1;
  int M = 1;
  double re_lo = 0.1, re_hi = 0.9, im_max = 0.2;  // exponent box
  // Minimum lattice distance of the resonance ratios, for every listed sigma.
  double min_gap = 0.02;
  std::vector<Permutation> sigmas;  // empty: identity only
  std::function<bool(const ParamSet&)> accept;
  int max_tries = 5000;
};

// Rejection-sampled generic exponents; ConfigError when max_tries runs out.
ParamSet sample_params(const ParamRequest& req, Rng& rng, const QContext& ctx);

struct PointRequest {
  std::vector<DomainSpec> domains;  // point must lie in all of them
  int uniform_shifts = 0;  // t -> q^n t for 0 <= n <= uniform_shifts must stay inside
  int single_shifts = 0;   // plus up to this many single-variable shifts t_i -> q t_i
  double log_lo = -14.0, log_hi = 10.0;  // search box for log|t_i|
  double abs_min = 0.0, abs_max = 0.0;   // optional extra bounds on |t_i| (0: off)
  double target_slack = 1.0;
  double min_slack = 0.1;
  double max_arg = 0.3;
};

// Maximizes the worst-bound slack over log|t|, then returns a random point
// between that optimum and a random draw whose slack still reaches
// min(target_slack, optimum); nullopt when the optimum is below min_slack.
std::optional<CVec> sample_point(const PointRequest& req, int M, Rng& rng, const QContext& ctx);

// The optimum used by sample_point.
double best_slack(const PointRequest& req, int M, Rng& rng, const QContext& ctx);

// min over bounds of -log|monomial| / (sum of |exponents|), worst case over the
// admissible shifts, at log|t| = x. The division gives the per-shell decay
// rate: a monomial in two variables is spread over two shell indices.
double point_slack(const PointRequest& req, const std::vector<double>& x, const QContext& ctx);

// Complex spectral value with modulus in [rmin, rmax], |arg| <= max_arg, and
// |theta(c x)| >= 1e-6 for every listed c.
cplx sample_spectral(Rng& rng, const QContext& ctx, const CVec& avoid, double rmin = 0.3,
                     double rmax = 3.0, double max_arg = 0.4);

// Uniformly random permutation of {1..M}.
Permutation random_permutation(int M, Rng& rng);

}  // namespace qconnect
