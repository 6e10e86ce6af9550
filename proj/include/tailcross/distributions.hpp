#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "tailcross/errors.hpp"
#include "tailcross/rng.hpp"

namespace tailcross {

/// Shape values this close to zero are routed to the exponential/Gumbel
/// branch; (1 + xi*w/sigma)^(-1/xi) loses all precision before that.
inline constexpr double kShapeZeroTol = 1e-9;

// ---------------------------------------------------------------------------
// Generalized Pareto, location zero
// ---------------------------------------------------------------------------

struct GpdParams {
  double shape = 0.0;  // xi
  double scale = 1.0;  // sigma > 0

  void validate() const {
    if (!(scale > 0.0)) throw domain_error("gpd: scale must be positive");
  }
  /// Upper endpoint of the support (infinite for xi >= 0).
  double upper_endpoint() const {
    return shape < -kShapeZeroTol ? -scale / shape
                                  : std::numeric_limits<double>::infinity();
  }
};

inline double gpd_cdf(const GpdParams& params, double w) {
  params.validate();
  if (w < 0.0 || w > params.upper_endpoint())
    throw domain_error("gpd_cdf: w outside support");
  if (std::abs(params.shape) <= kShapeZeroTol)
    return -std::expm1(-w / params.scale);
  const double t = 1.0 + params.shape * w / params.scale;
  if (t <= 0.0) return 1.0;  // at the upper endpoint for xi < 0
  return 1.0 - std::pow(t, -1.0 / params.shape);
}

inline double gpd_quantile(const GpdParams& params, double p) {
  params.validate();
  if (!(p >= 0.0) || p >= 1.0)
    throw domain_error("gpd_quantile: p must lie in [0, 1)");
  if (std::abs(params.shape) <= kShapeZeroTol)
    return -params.scale * std::log1p(-p);
  return params.scale * std::expm1(-params.shape * std::log1p(-p)) /
         params.shape;
}

inline std::vector<double> gpd_sample(const GpdParams& params, RngStream& rng,
                                      std::size_t n) {
  params.validate();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(gpd_quantile(params, rng.uniform()));
  return out;
}

// ---------------------------------------------------------------------------
// Pareto-type tail, F(x) = 1 - x^(-1/xi) on (1, inf), xi > 0
// ---------------------------------------------------------------------------

inline double pareto_tail_quantile(double shape, double p) {
  if (!(shape > 0.0)) throw domain_error("pareto_tail: shape must be positive");
  if (!(p >= 0.0) || p >= 1.0)
    throw domain_error("pareto_tail_quantile: p must lie in [0, 1)");
  return std::pow(1.0 - p, -shape);
}

inline double pareto_tail_cdf(double shape, double x) {
  if (!(shape > 0.0)) throw domain_error("pareto_tail: shape must be positive");
  if (x < 1.0) throw domain_error("pareto_tail_cdf: x outside support");
  return 1.0 - std::pow(x, -1.0 / shape);
}

inline std::vector<double> pareto_tail_sample(double shape, RngStream& rng,
                                              std::size_t n) {
  if (!(shape > 0.0)) throw domain_error("pareto_tail: shape must be positive");
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    out.push_back(std::pow(1.0 - rng.uniform(), -shape));
  return out;
}

// ---------------------------------------------------------------------------
// Generalized extreme value
// ---------------------------------------------------------------------------

struct GevParams {
  double shape = 0.0;  // xi
  double a = 1.0;      // > 0
  double b = 0.0;

  void validate() const {
    if (!(a > 0.0)) throw domain_error("gev: a must be positive");
  }
};

inline double gev_cdf(const GevParams& params, double x) {
  params.validate();
  const double s = params.a * x + params.b;
  if (std::abs(params.shape) <= kShapeZeroTol) return std::exp(-std::exp(-s));
  const double t = 1.0 + params.shape * s;
  if (t <= 0.0) throw domain_error("gev_cdf: 1 + xi(ax+b) must be positive");
  return std::exp(-std::pow(t, -1.0 / params.shape));
}

// ---------------------------------------------------------------------------
// Gaussian mixture latent density
// ---------------------------------------------------------------------------

struct GaussianMixture {
  struct Component {
    double mean;
    double stddev;
    double weight;
  };
  std::vector<Component> components;

  void validate() const {
    if (components.empty()) throw domain_error("mixture: no components");
    double total = 0.0;
    for (const auto& c : components) {
      if (!(c.stddev > 0.0)) throw domain_error("mixture: stddev must be positive");
      if (!(c.weight > 0.0)) throw domain_error("mixture: weight must be positive");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw domain_error("mixture: weights must sum to 1");
  }

  double sample_one(RngStream& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    for (const auto& c : components) {
      acc += c.weight;
      if (u < acc) return c.mean + c.stddev * rng.normal();
    }
    const auto& last = components.back();
    return last.mean + last.stddev * rng.normal();
  }
};

inline std::vector<double> mixture_sample(const GaussianMixture& mix,
                                          RngStream& rng, std::size_t n) {
  mix.validate();
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(mix.sample_one(rng));
  return out;
}

// ---------------------------------------------------------------------------
// Analytic marginals with known regularity behaviour
// ---------------------------------------------------------------------------

enum class AnalyticMarginal {
  example1,  // exponential with uniformly drawn rate; marginal tail ~ 1/w
  example3,  // survival x^(-1) / (1 + ln x) on [1, inf)
};

inline double example3_survival(double x) {
  if (x < 1.0) throw domain_error("example3_survival: x must be >= 1");
  return 1.0 / (x * (1.0 + std::log(x)));
}

/// Inverts example3_survival by bisection.  The survival is strictly
/// decreasing, so the bracket [1, exp(64)] cannot fail for s in (0, 1].
inline double example3_inverse_survival(double s) {
  if (!(s > 0.0) || s > 1.0)
    throw domain_error("example3_inverse_survival: s must lie in (0, 1]");
  if (s == 1.0) return 1.0;
  double lo = 1.0, hi = std::exp(64.0);
  if (example3_survival(hi) > s)
    throw error("example3_inverse_survival: bracket exhausted");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (example3_survival(mid) > s)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> analytic_marginal_sample(AnalyticMarginal kind,
                                                    RngStream& rng,
                                                    std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (kind == AnalyticMarginal::example1) {
      const double rate = 1.0 - rng.uniform();  // (0, 1]
      out.push_back(-std::log(1.0 - rng.uniform()) / rate);
    } else {
      out.push_back(example3_inverse_survival(1.0 - rng.uniform()));
    }
  }
  return out;
}

}  // namespace tailcross
