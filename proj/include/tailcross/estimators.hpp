#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "tailcross/errors.hpp"
#include "tailcross/rng.hpp"

namespace tailcross {

enum class EstimatorKind { pickands, dedh };

inline const char* to_string(EstimatorKind kind) {
  return kind == EstimatorKind::pickands ? "pickands" : "dedh";
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "pickands") return EstimatorKind::pickands;
  if (s == "dedh") return EstimatorKind::dedh;
  throw parse_error("unknown estimator: " + s);
}

/// Samples sorted in descending order; X_{k,n} is values[k-1].
struct SortedBatch {
  std::vector<double> values;

  std::size_t n() const { return values.size(); }
  /// 1-based order statistic.
  double order(std::size_t k) const { return values[k - 1]; }
};

/// Stable descending sort; ties keep their input order.
inline SortedBatch sort_descending(std::vector<double> samples) {
  std::stable_sort(samples.begin(), samples.end(), std::greater<double>());
  return SortedBatch{std::move(samples)};
}

struct TailEstimate {
  double value = 0.0;
  EstimatorKind estimator = EstimatorKind::pickands;
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t splits = 1;
};

inline TailEstimate pickands(const SortedBatch& batch, std::size_t k) {
  if (k < 1 || 4 * k > batch.n())
    throw insufficient_samples_error("pickands: need 4k <= n, k >= 1");
  const double xk = batch.order(k);
  const double x2k = batch.order(2 * k);
  const double x4k = batch.order(4 * k);
  const double num = xk - x2k;
  const double den = x2k - x4k;
  if (den == 0.0)
    throw degenerate_spacing_error("pickands: X_{2k} == X_{4k}");
  if (num / den <= 0.0)
    throw degenerate_spacing_error("pickands: non-positive spacing ratio");
  return TailEstimate{std::log(num / den) / std::log(2.0),
                      EstimatorKind::pickands, k, batch.n(), 1};
}

inline TailEstimate dedh(const SortedBatch& batch, std::size_t k) {
  if (k < 1 || k + 1 > batch.n())
    throw insufficient_samples_error("dedh: need k+1 <= n, k >= 1");
  const double base = batch.order(k + 1);
  if (!(base > 0.0))
    throw positivity_error("dedh: top k+1 samples must be positive");
  double h1 = 0.0, h2 = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    const double xj = batch.order(j);
    if (!(xj > 0.0))
      throw positivity_error("dedh: top k+1 samples must be positive");
    const double d = std::log1p((xj - base) / base);
    h1 += d;
    h2 += d * d;
  }
  h1 /= static_cast<double>(k);
  h2 /= static_cast<double>(k);
  if (h1 * h1 == h2)
    throw degenerate_moments_error("dedh: (H1)^2 == H2");
  const double value = 1.0 + h1 + 0.5 / (h1 * h1 / h2 - 1.0);
  return TailEstimate{value, EstimatorKind::dedh, k, batch.n(), 1};
}

inline TailEstimate estimate(const SortedBatch& batch, EstimatorKind kind,
                             std::size_t k) {
  return kind == EstimatorKind::pickands ? pickands(batch, k) : dedh(batch, k);
}

// ---------------------------------------------------------------------------
// k selection
// ---------------------------------------------------------------------------

struct KRule {
  enum class Mode { fraction, fixed };
  Mode mode = Mode::fraction;
  double fraction = 0.0;  // 0 means "use the per-estimator default"
  std::size_t fixed_k = 0;
};

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::pickands;
  KRule k_rule{};
  std::size_t splits = 1;  // p

  // Defaults: top 2% for Pickands (4k = 8% of the batch), top 3% for DEdH.
  double effective_fraction() const {
    if (k_rule.fraction > 0.0) return k_rule.fraction;
    return kind == EstimatorKind::pickands ? 0.02 : 0.03;
  }

  void validate() const {
    if (splits < 1) throw domain_error("estimator config: splits must be >= 1");
    if (k_rule.mode == KRule::Mode::fraction) {
      const double q = effective_fraction();
      const double cap = kind == EstimatorKind::pickands ? 0.25 : 0.5;
      if (!(q > 0.0) || q > cap)
        throw domain_error("estimator config: k fraction out of range");
    } else if (k_rule.fixed_k < 1) {
      throw domain_error("estimator config: fixed k must be >= 1");
    }
  }
};

inline std::size_t default_k(std::size_t n, const EstimatorConfig& config) {
  config.validate();
  if (n < 8) throw insufficient_samples_error("default_k: need n >= 8");
  if (config.k_rule.mode == KRule::Mode::fraction) {
    const auto k = static_cast<std::size_t>(
        std::floor(config.effective_fraction() * static_cast<double>(n)));
    return std::max<std::size_t>(1, k);
  }
  const std::size_t cap =
      config.kind == EstimatorKind::pickands ? n / 4 : n - 1;
  return std::min(config.k_rule.fixed_k, cap);
}

// ---------------------------------------------------------------------------
// Split averaging
// ---------------------------------------------------------------------------

struct SplitResult {
  TailEstimate estimate;
  std::size_t degenerate_groups = 0;
};

/// Partitions the samples into p equal groups by a seeded random
/// permutation (remainder discarded), estimates each group, and averages.
/// Degenerate groups are skipped and counted; if every group is degenerate
/// the whole estimate fails.
inline SplitResult split_average(const std::vector<double>& samples,
                                 std::size_t p, const EstimatorConfig& config,
                                 RngStream& rng) {
  config.validate();
  if (p < 1) throw domain_error("split_average: p must be >= 1");
  const std::size_t group = samples.size() / p;
  if (group < 8)
    throw insufficient_samples_error("split_average: groups too small");

  std::vector<std::size_t> perm(samples.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);

  const std::size_t k = default_k(group, config);
  double sum = 0.0;
  std::size_t ok = 0, degenerate = 0;
  for (std::size_t g = 0; g < p; ++g) {
    std::vector<double> part(group);
    for (std::size_t i = 0; i < group; ++i)
      part[i] = samples[perm[g * group + i]];
    try {
      sum += estimate(sort_descending(std::move(part)), config.kind, k).value;
      ++ok;
    } catch (const degenerate_error&) {
      ++degenerate;
    }
  }
  if (ok == 0)
    throw estimation_failed_error("split_average: all groups degenerate");
  TailEstimate result{sum / static_cast<double>(ok), config.kind, k,
                      samples.size(), p};
  return SplitResult{result, degenerate};
}

inline SplitResult split_average(const std::vector<double>& samples,
                                 const EstimatorConfig& config,
                                 RngStream& rng) {
  return split_average(samples, config.splits, config, rng);
}

// ---------------------------------------------------------------------------
// Threshold excesses (POT diagnostics)
// ---------------------------------------------------------------------------

/// Returns x - threshold for every sample strictly above the empirical
/// `percentile` quantile.
inline std::vector<double> threshold_excesses(std::vector<double> samples,
                                              double percentile) {
  if (!(percentile > 0.0) || !(percentile < 1.0))
    throw domain_error("threshold_excesses: percentile must lie in (0, 1)");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  const auto idx = static_cast<std::size_t>(
      std::ceil(percentile * static_cast<double>(n)));
  if (idx == 0 || idx > n)
    throw insufficient_samples_error("threshold_excesses: empty sample");
  const double threshold = samples[idx - 1];
  std::vector<double> excesses;
  for (std::size_t i = idx; i < n; ++i)
    if (samples[i] > threshold) excesses.push_back(samples[i] - threshold);
  if (excesses.size() < 10)
    throw insufficient_samples_error(
        "threshold_excesses: fewer than 10 exceedances");
  return excesses;
}

/// Empirical percentile used by threshold_excesses; exposed for diagnostics.
inline double empirical_threshold(std::vector<double> samples,
                                  double percentile) {
  if (!(percentile > 0.0) || !(percentile < 1.0))
    throw domain_error("empirical_threshold: percentile must lie in (0, 1)");
  std::sort(samples.begin(), samples.end());
  const auto idx = static_cast<std::size_t>(
      std::ceil(percentile * static_cast<double>(samples.size())));
  if (idx == 0 || idx > samples.size())
    throw insufficient_samples_error("empirical_threshold: empty sample");
  return samples[idx - 1];
}

}  // namespace tailcross
