#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "tailcross/errors.hpp"
#include "tailcross/estimators.hpp"
#include "tailcross/rng.hpp"

namespace tailcross {

/// Observed losses of one conditional distribution (one training-set draw).
struct ConditionalSamples {
  std::size_t id = 0;
  std::vector<double> samples;
};

struct ConditionalEstimate {
  std::size_t id = 0;
  double estimate = 0.0;
  std::size_t degenerate_splits = 0;
  bool failed = false;  // every split degenerate; excluded from the max
};

/// Cross-tail verdict: the max of the per-conditional estimates.  The max
/// is carried even when non-positive so downstream ranking can compare.
struct CteResult {
  bool positive = false;
  double value = 0.0;  // max of per-conditional estimates
  std::vector<ConditionalEstimate> conditionals;

  std::size_t total_degenerate_splits() const {
    std::size_t n = 0;
    for (const auto& c : conditionals) n += c.degenerate_splits;
    return n;
  }
};

/// Per-conditional split-averaged estimates reduced by max.  Substreams are
/// keyed by conditional id, so the verdict does not depend on evaluation
/// order.
inline CteResult cte(const std::vector<ConditionalSamples>& conditionals,
                     std::size_t p, const EstimatorConfig& config,
                     const RngStream& rng) {
  if (conditionals.empty())
    throw domain_error("cte: need at least one conditional");
  CteResult result;
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& cond : conditionals) {
    ConditionalEstimate ce;
    ce.id = cond.id;
    RngStream sub = rng.fork(cond.id);
    try {
      SplitResult sr = split_average(cond.samples, p, config, sub);
      ce.estimate = sr.estimate.value;
      ce.degenerate_splits = sr.degenerate_groups;
      if (!any || ce.estimate > best) best = ce.estimate;
      any = true;
    } catch (const estimation_failed_error&) {
      ce.failed = true;
      ce.degenerate_splits = p;
    }
    result.conditionals.push_back(ce);
  }
  if (!any)
    throw estimation_failed_error("cte: every conditional degenerate");
  result.value = best;
  result.positive = best > 0.0;
  return result;
}

inline CteResult cte(const std::vector<ConditionalSamples>& conditionals,
                     const EstimatorConfig& config, const RngStream& rng) {
  return cte(conditionals, config.splits, config, rng);
}

/// Naive cross-tail estimation: one whole-sample estimate per conditional.
/// Identical to cte() with p = 1.
inline CteResult ncte(const std::vector<ConditionalSamples>& conditionals,
                      const EstimatorConfig& config) {
  return cte(conditionals, 1, config, RngStream(0));
}

/// Pooled peaks-over-threshold baseline: concatenates every conditional's
/// samples and split-averages the union.  With p = 1 this is the plain
/// pooled estimator.
inline SplitResult pooled_pot(
    const std::vector<ConditionalSamples>& conditionals,
    const EstimatorConfig& config, RngStream& rng) {
  std::vector<double> pooled;
  for (const auto& cond : conditionals)
    pooled.insert(pooled.end(), cond.samples.begin(), cond.samples.end());
  if (pooled.empty()) throw domain_error("pooled_pot: empty union");
  return split_average(pooled, config.splits, config, rng);
}

// ---------------------------------------------------------------------------
// Tail sign algebra
// ---------------------------------------------------------------------------

struct TailVerdict {
  bool positive = false;
  double value = 0.0;  // meaningful only when positive

  static TailVerdict make_positive(double v) {
    if (!(v > 0.0)) throw domain_error("positive verdict needs value > 0");
    return TailVerdict{true, v};
  }
  static TailVerdict non_positive() { return TailVerdict{false, 0.0}; }
};

/// Tail of |X| from the tails of the two half-axes: positive sides win by
/// max, otherwise the result stays non-positive.
inline TailVerdict abs_tail(const TailVerdict& left, const TailVerdict& right) {
  if (left.positive && right.positive)
    return TailVerdict::make_positive(std::max(left.value, right.value));
  if (left.positive) return left;
  if (right.positive) return right;
  return TailVerdict::non_positive();
}

/// Tail of X^alpha: a positive shape scales by alpha, a non-positive one
/// stays non-positive.
inline TailVerdict power_tail(const TailVerdict& x, double alpha) {
  if (!(alpha > 0.0)) throw domain_error("power_tail: alpha must be positive");
  if (!x.positive) return TailVerdict::non_positive();
  return TailVerdict::make_positive(alpha * x.value);
}

struct MomentBound {
  bool all_finite = false;
  double order = 0.0;  // moments of order r > this are infinite
};

inline MomentBound moment_bound(const TailVerdict& x) {
  if (!x.positive) return MomentBound{true, 0.0};
  return MomentBound{false, 1.0 / x.value};
}

/// Tail of |Y - prediction|^p from the two prediction tails.
inline TailVerdict prediction_tail_to_loss_tail(const TailVerdict& pred_left,
                                                const TailVerdict& pred_right,
                                                double p) {
  return power_tail(abs_tail(pred_left, pred_right), p);
}

}  // namespace tailcross
