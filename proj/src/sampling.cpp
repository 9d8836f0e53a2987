#include "qconnect/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qconnect {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

int Rng::below(int n) { return static_cast<int>(uniform() * n); }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

ParamSet sample_params(const ParamRequest& req, Rng& rng, const QContext& ctx) {
  std::vector<Permutation> sigmas = req.sigmas;
  if (sigmas.empty()) sigmas.push_back(Permutation::identity(req.M));
  auto draw = [&](int n) {
    CVec v;
    for (int i = 0; i < n; ++i)
      v.emplace_back(rng.uniform(req.re_lo, req.re_hi), rng.uniform(-req.im_max, req.im_max));
    return v;
  };
  for (int attempt = 0; attempt < req.max_tries; ++attempt) {
    CVec al = draw(req.N), be = draw(req.M), ga = draw(req.N);
    ParamSet p;
    try {
      p = ParamSet::from_exponents(al, be, ga, ctx);
    } catch (const ResonanceError&) {
      continue;
    }
    bool ok = true;
    for (const auto& s : sigmas) {
      const ResonanceReport rep = check_resonance(p, s, ctx);
      if (!rep.ok() || rep.min_distance < req.min_gap) {
        ok = false;
        break;
      }
    }
    if (ok && req.accept && !req.accept(p)) ok = false;
    if (ok) return p;
  }
  throw ConfigError("parameter sampler found no admissible parameters");
}

double point_slack(const PointRequest& req, const std::vector<double>& x, const QContext& ctx) {
  const double lq = -std::log(std::abs(ctx.q()));  // > 0
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& d : req.domains) {
    for (const auto& b : d.bounds) {
      double v = std::log(std::abs(b.coeff));
      int total = 0;
      std::vector<int> neg;
      for (std::size_t i = 0; i < b.exps.size(); ++i) {
        v += b.exps[i] * x[i];
        total += b.exps[i];
        if (b.exps[i] < 0) neg.push_back(b.exps[i]);
      }
      std::sort(neg.begin(), neg.end());
      double grow = lq * req.uniform_shifts * std::max(0, -total);
      for (int j = 0; j < req.single_shifts && j < static_cast<int>(neg.size()); ++j)
        grow -= lq * neg[static_cast<std::size_t>(j)];
      int weight = 0;
      for (int e : b.exps) weight += std::abs(e);
      slack = std::min(slack, -(v + grow) / std::max(weight, 1));
    }
  }
  return slack;
}

namespace {

// Pattern search on the concave slack function. Directions e_i and
// e_i +- e_j, so ridges along a diagonal do not stall it.
std::vector<double> climb(const PointRequest& req, std::vector<double> x, double lo, double hi,
                          const QContext& ctx) {
  const std::size_t n = x.size();
  std::vector<std::vector<double>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d(n, 0.0);
    d[i] = 1.0;
    dirs.push_back(d);
    for (std::size_t j = i + 1; j < n; ++j) {
      for (double sgn : {1.0, -1.0}) {
        std::vector<double> e = d;
        e[j] = sgn;
        dirs.push_back(e);
      }
    }
  }
  double cur = point_slack(req, x, ctx);
  for (double step = 0.25 * (hi - lo); step > 1e-6; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (const auto& d : dirs) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> y = x;
          for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(y[i] + sgn * step * d[i], lo, hi);
          const double s = point_slack(req, y, ctx);
          if (s > cur + 1e-12) {
            x = std::move(y);
            cur = s;
            moved = true;
          }
        }
      }
    }
  }
  return x;
}

}  // namespace

std::optional<CVec> sample_point(const PointRequest& req, int M, Rng& rng, const QContext& ctx) {
  double lo = req.log_lo, hi = req.log_hi;
  if (req.abs_min > 0.0) lo = std::max(lo, std::log(req.abs_min));
  if (req.abs_max > 0.0) hi = std::min(hi, std::log(req.abs_max));
  if (!(lo < hi)) throw ConfigError("empty search box for sample points");

  auto draw = [&] {
    std::vector<double> x(static_cast<std::size_t>(M));
    for (auto& v : x) v = rng.uniform(lo, hi);
    return x;
  };
  std::vector<double> centre;
  double best = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < 4; ++start) {
    std::vector<double> x = climb(req, draw(), lo, hi, ctx);
    const double s = point_slack(req, x, ctx);
    if (s > best) {
      best = s;
      centre = std::move(x);
    }
  }
  if (best < req.min_slack) return std::nullopt;

  // Random point on the segment from the centre towards a random draw, kept
  // where the slack still meets the target; concavity makes the set an interval.
  const double target = std::min(req.target_slack, best);
  const std::vector<double> far = draw();
  auto at = [&](double lam) {
    std::vector<double> y(centre.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = centre[i] + lam * (far[i] - centre[i]);
    return y;
  };
  double a = 0.0, b = 1.0;
  if (point_slack(req, at(1.0), ctx) < target) {
    for (int it = 0; it < 60; ++it) {
      const double m = 0.5 * (a + b);
      (point_slack(req, at(m), ctx) >= target ? a : b) = m;
    }
  } else {
    a = 1.0;
  }
  const std::vector<double> x = at(rng.uniform() * a);
  CVec t;
  for (double v : x) t.push_back(std::polar(std::exp(v), rng.uniform(-req.max_arg, req.max_arg)));
  return t;
}

double best_slack(const PointRequest& req, int M, Rng& rng, const QContext& ctx) {
  double lo = req.log_lo, hi = req.log_hi;
  if (req.abs_min > 0.0) lo = std::max(lo, std::log(req.abs_min));
  if (req.abs_max > 0.0) hi = std::min(hi, std::log(req.abs_max));
  double best = -std::numeric_limits<double>::infinity();
  for (int start = 0; start < 4; ++start) {
    std::vector<double> x(static_cast<std::size_t>(M));
    for (auto& v : x) v = rng.uniform(lo, hi);
    best = std::max(best, point_slack(req, climb(req, x, lo, hi, ctx), ctx));
  }
  return best;
}

cplx sample_spectral(Rng& rng, const QContext& ctx, const CVec& avoid, double rmin, double rmax,
                     double max_arg) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double r = std::exp(rng.uniform(std::log(rmin), std::log(rmax)));
    const cplx x = std::polar(r, rng.uniform(-max_arg, max_arg));
    bool ok = true;
    for (cplx c : avoid) ok = ok && std::abs(theta(c * x, ctx)) >= 1e-6;
    if (ok) return x;
  }
  throw ConfigError("spectral sampler could not avoid theta zeros");
}

Permutation random_permutation(int M, Rng& rng) {
  std::vector<int> img(static_cast<std::size_t>(M));
  std::iota(img.begin(), img.end(), 1);
  for (int i = M - 1; i > 0; --i) std::swap(img[i], img[rng.below(i + 1)]);
  return Permutation(img);
}

}  // namespace qconnect
