#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tailcross/cte.hpp"
#include "tailcross/distributions.hpp"
#include "tailcross/errors.hpp"
#include "tailcross/estimators.hpp"
#include "tailcross/result.hpp"
#include "tailcross/rng.hpp"

namespace tailcross {

// Stream purposes; keep stable so experiment tables replay byte-identically.
namespace stream_purpose {
inline constexpr std::uint64_t latent_mixture = 1;
inline constexpr std::uint64_t marginal_draws = 2;
inline constexpr std::uint64_t split_partition = 3;
inline constexpr std::uint64_t latent_values = 4;
}  // namespace stream_purpose

// ---------------------------------------------------------------------------
// The latent shape field xi_z
// ---------------------------------------------------------------------------

/// Parameters of the latent shape field
///   xi_z = (((n z + 2 m^2 + k z^3) e^{-|z|} + a) / b + c) / d.
/// The printed constants do not make the field maximum equal xi_max (the
/// z = 0 value already exceeds it), so ground truth for experiments is
/// always taken from xi_field_max, never from the nominal xi_max input.
struct XiFieldParams {
  double n = 1.0;
  double m = 2.0;
  double k = 2.0;
  double b = 5.76;
  double a = -3.0 * 5.76 - 3.80;
  double xi_max = 0.0;

  static XiFieldParams from_xi_max(double xi_max) {
    if (xi_max < -4.0 || xi_max > 5.0)
      throw domain_error("xi field: xi_max must lie in [-4, 5]");
    XiFieldParams f;
    f.xi_max = xi_max;
    return f;
  }

  double d() const { return 1.0 / (7.0 / 8.0 * xi_max + 29.0 / 8.0); }
  double c() const { return d() * xi_max + 3.0; }
};

inline double xi_z(double z, const XiFieldParams& f) {
  const double poly = f.n * z + 2.0 * f.m * f.m + f.k * z * z * z;
  return ((poly * std::exp(-std::abs(z)) + f.a) / f.b + f.c()) / f.d();
}

/// Numeric maximum of xi_z over a grid; the scenario ground truth.
inline double xi_field_max(const XiFieldParams& f, double lo = -10.0,
                           double hi = 10.0, double step = 1e-3) {
  if (!(lo < hi) || !(step > 0.0))
    throw domain_error("xi_field_max: bad grid");
  double best = xi_z(lo, f);
  for (double z = lo + step; z <= hi; z += step)
    best = std::max(best, xi_z(z, f));
  return best;
}

// ---------------------------------------------------------------------------
// Scenarios
// ---------------------------------------------------------------------------

enum class ScenarioKind {
  baseline_5_1,      // zero-location conditionals
  shifted_5_2,       // heavy conditionals translated by xi_z^{-4}
  finite_mixture,    // finite list of (weight, Pareto shape)
  appendixB_example1,
  appendixC_example3,
};

inline const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::baseline_5_1: return "baseline-5-1";
    case ScenarioKind::shifted_5_2: return "shifted-5-2";
    case ScenarioKind::finite_mixture: return "finite-mixture";
    case ScenarioKind::appendixB_example1: return "appendixB-example1";
    case ScenarioKind::appendixC_example3: return "appendixC-example3";
  }
  return "?";
}

inline ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "baseline-5-1") return ScenarioKind::baseline_5_1;
  if (s == "shifted-5-2") return ScenarioKind::shifted_5_2;
  if (s == "finite-mixture") return ScenarioKind::finite_mixture;
  if (s == "appendixB-example1") return ScenarioKind::appendixB_example1;
  if (s == "appendixC-example3") return ScenarioKind::appendixC_example3;
  throw parse_error("unknown scenario: " + s);
}

struct MixtureComponentSpec {
  double weight;
  double shape;  // Pareto tail shape, > 0
};

struct MarginalScenario {
  ScenarioKind kind = ScenarioKind::baseline_5_1;
  XiFieldParams xi_field{};            // baseline/shifted
  GaussianMixture latent{};            // baseline/shifted
  std::vector<MixtureComponentSpec> mixture;  // finite-mixture

  void validate() const {
    if (kind == ScenarioKind::finite_mixture) {
      if (mixture.empty())
        throw domain_error("finite-mixture scenario: no components");
      double total = 0.0;
      for (const auto& c : mixture) {
        if (!(c.shape > 0.0))
          throw domain_error("finite-mixture scenario: shapes must be > 0");
        total += c.weight;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw domain_error("finite-mixture scenario: weights must sum to 1");
    }
  }
};

/// Draws the 30-component latent mixture: means uniform in [-5, 5],
/// stddevs uniform in [0, 4] with near-zero values rejected.
inline GaussianMixture make_latent_mixture(RngStream& rng,
                                           std::size_t components = 30) {
  GaussianMixture mix;
  for (std::size_t i = 0; i < components; ++i) {
    const double mean = -5.0 + 10.0 * rng.uniform();
    double stddev = 0.0;
    do {
      stddev = 4.0 * rng.uniform();
    } while (stddev < 1e-6);
    mix.components.push_back(
        {mean, stddev, 1.0 / static_cast<double>(components)});
  }
  return mix;
}

/// One conditional draw for the latent-field scenarios: GPD(xi_z, 1) when
/// xi_z <= 0, Pareto tail otherwise; the shifted scenario translates heavy
/// conditionals by xi_z^{-4}.
inline double conditional_draw(double xi, bool shifted, RngStream& rng) {
  if (xi <= 0.0) return gpd_quantile(GpdParams{xi, 1.0}, rng.uniform());
  double x = pareto_tail_quantile(xi, rng.uniform());
  if (shifted) x += 1.0 / (xi * xi * xi * xi);
  return x;
}

inline std::vector<double> sample_marginal(const MarginalScenario& scenario,
                                           std::size_t count, RngStream& rng) {
  scenario.validate();
  switch (scenario.kind) {
    case ScenarioKind::appendixB_example1:
      return analytic_marginal_sample(AnalyticMarginal::example1, rng, count);
    case ScenarioKind::appendixC_example3:
      return analytic_marginal_sample(AnalyticMarginal::example3, rng, count);
    case ScenarioKind::finite_mixture: {
      std::vector<double> out;
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        const double u = rng.uniform();
        double acc = 0.0;
        double shape = scenario.mixture.back().shape;
        for (const auto& c : scenario.mixture) {
          acc += c.weight;
          if (u < acc) {
            shape = c.shape;
            break;
          }
        }
        out.push_back(pareto_tail_quantile(shape, rng.uniform()));
      }
      return out;
    }
    case ScenarioKind::baseline_5_1:
    case ScenarioKind::shifted_5_2: {
      const bool shifted = scenario.kind == ScenarioKind::shifted_5_2;
      std::vector<double> out;
      out.reserve(count);
      for (std::size_t i = 0; i < count; ++i) {
        const double z = scenario.latent.sample_one(rng);
        out.push_back(conditional_draw(xi_z(z, scenario.xi_field), shifted, rng));
      }
      return out;
    }
  }
  throw error("sample_marginal: unreachable");
}

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

struct RunSpec {
  // Exactly one of pooled_budget / (conditional_count, per_conditional) set.
  std::optional<std::size_t> pooled_budget;        // M
  std::optional<std::size_t> conditional_count;    // K
  std::optional<std::size_t> per_conditional;      // N
  std::size_t splits = 10;                         // p
  std::size_t repeats = 1;
  EstimatorConfig estimator{};
  std::uint64_t seed = 0;

  void validate() const {
    const bool pooled = pooled_budget.has_value();
    const bool grouped =
        conditional_count.has_value() && per_conditional.has_value();
    if (pooled == grouped)
      throw domain_error("run spec: set exactly one of M or (K, N)");
    if (splits < 1 || (repeats > 0 && pooled && *pooled_budget == 0))
      throw domain_error("run spec: counts must be positive");
  }
};

/// Ground truth shape of a scenario's marginal, when known analytically or
/// numerically.
inline std::optional<double> scenario_ground_truth(
    const MarginalScenario& scenario) {
  switch (scenario.kind) {
    case ScenarioKind::baseline_5_1:
    case ScenarioKind::shifted_5_2:
      return xi_field_max(scenario.xi_field);
    case ScenarioKind::finite_mixture: {
      double best = scenario.mixture.front().shape;
      for (const auto& c : scenario.mixture) best = std::max(best, c.shape);
      return best;
    }
    case ScenarioKind::appendixB_example1:
    case ScenarioKind::appendixC_example3:
      return 1.0;  // survival ~ x^{-1} times a slowly varying factor
  }
  return std::nullopt;
}

/// Builds the scenario for one (cell, repeat) pair; the latent mixture is
/// regenerated from its own substream so tables replay exactly.
inline MarginalScenario instantiate_scenario(const MarginalScenario& base,
                                             std::uint64_t seed,
                                             std::size_t cell,
                                             std::size_t repeat) {
  MarginalScenario scenario = base;
  if (scenario.kind == ScenarioKind::baseline_5_1 ||
      scenario.kind == ScenarioKind::shifted_5_2) {
    RngStream latent_rng(seed, stream_purpose::latent_mixture, cell, repeat);
    scenario.latent = make_latent_mixture(latent_rng);
  }
  return scenario;
}

/// Pooled experiment: M marginal samples per repeat, split-averaged.
inline std::vector<ResultRow> run_pot_experiment(const MarginalScenario& base,
                                                 const RunSpec& spec,
                                                 std::size_t cell_index = 0,
                                                 std::size_t repeat_offset = 0) {
  spec.validate();
  if (!spec.pooled_budget)
    throw domain_error("run_pot_experiment: spec must use the pooled budget M");
  std::vector<ResultRow> rows;
  for (std::size_t rep = repeat_offset; rep < repeat_offset + spec.repeats;
       ++rep) {
    MarginalScenario scenario =
        instantiate_scenario(base, spec.seed, cell_index, rep);
    RngStream draw_rng(spec.seed, stream_purpose::marginal_draws, cell_index,
                       rep);
    auto samples = sample_marginal(scenario, *spec.pooled_budget, draw_rng);
    RngStream split_rng(spec.seed, stream_purpose::split_partition, cell_index,
                        rep);
    ResultRow row;
    row.scenario = to_string(scenario.kind);
    row.param = scenario.kind == ScenarioKind::finite_mixture ||
                        scenario.kind == ScenarioKind::appendixB_example1 ||
                        scenario.kind == ScenarioKind::appendixC_example3
                    ? 0.0
                    : scenario.xi_field.xi_max;
    row.repeat_index = rep;
    row.method = "pot";
    row.estimator = to_string(spec.estimator.kind);
    row.ground_truth = scenario_ground_truth(scenario);
    SplitResult sr =
        split_average(samples, spec.splits, spec.estimator, split_rng);
    row.estimate = sr.estimate.value;
    row.degenerate_count = sr.degenerate_groups;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// CTE experiment: K latent draws, N conditional samples each,
/// split-averaged per conditional and reduced by max.
inline std::vector<ResultRow> run_cte_experiment(const MarginalScenario& base,
                                                 const RunSpec& spec,
                                                 std::size_t cell_index = 0,
                                                 std::size_t repeat_offset = 0) {
  spec.validate();
  if (!spec.conditional_count)
    throw domain_error("run_cte_experiment: spec must use (K, N)");
  if (base.kind != ScenarioKind::baseline_5_1 &&
      base.kind != ScenarioKind::shifted_5_2)
    throw domain_error("run_cte_experiment: needs a latent-field scenario");
  const bool shifted = base.kind == ScenarioKind::shifted_5_2;
  std::vector<ResultRow> rows;
  for (std::size_t rep = repeat_offset; rep < repeat_offset + spec.repeats;
       ++rep) {
    MarginalScenario scenario =
        instantiate_scenario(base, spec.seed, cell_index, rep);
    RngStream z_rng(spec.seed, stream_purpose::latent_values, cell_index, rep);
    RngStream draw_rng(spec.seed, stream_purpose::marginal_draws, cell_index,
                       rep);
    std::vector<ConditionalSamples> conditionals;
    for (std::size_t j = 0; j < *spec.conditional_count; ++j) {
      const double xi = xi_z(scenario.latent.sample_one(z_rng),
                             scenario.xi_field);
      RngStream cond_rng = draw_rng.fork(j);
      ConditionalSamples cond;
      cond.id = j;
      cond.samples.reserve(*spec.per_conditional);
      for (std::size_t i = 0; i < *spec.per_conditional; ++i)
        cond.samples.push_back(conditional_draw(xi, shifted, cond_rng));
      conditionals.push_back(std::move(cond));
    }
    RngStream split_rng(spec.seed, stream_purpose::split_partition, cell_index,
                        rep);
    CteResult result = cte(conditionals, spec.splits, spec.estimator,
                           split_rng);
    ResultRow row;
    row.scenario = to_string(scenario.kind);
    row.param = scenario.xi_field.xi_max;
    row.repeat_index = rep;
    row.method = spec.splits == 1 ? "ncte" : "cte";
    row.estimator = to_string(spec.estimator.kind);
    row.ground_truth = scenario_ground_truth(scenario);
    row.non_positive = !result.positive;
    row.estimate = result.value;
    row.degenerate_count = result.total_degenerate_splits();
    rows.push_back(std::move(row));
  }
  return rows;
}

/// CTE over a finite mixture: one conditional per component, each with
/// `per_conditional` samples from its own Pareto tail.  The matching pooled
/// baseline is run_pot_experiment with M = components * per_conditional,
/// which draws from the weighted mixture.
inline std::vector<ResultRow> run_finite_mixture_cte(
    const MarginalScenario& base, const RunSpec& spec,
    std::size_t cell_index = 0, std::size_t repeat_offset = 0) {
  spec.validate();
  base.validate();
  if (base.kind != ScenarioKind::finite_mixture)
    throw domain_error("run_finite_mixture_cte: needs a finite mixture");
  if (!spec.per_conditional)
    throw domain_error("run_finite_mixture_cte: spec must use (K, N)");
  std::vector<ResultRow> rows;
  for (std::size_t rep = repeat_offset; rep < repeat_offset + spec.repeats;
       ++rep) {
    RngStream draw_rng(spec.seed, stream_purpose::marginal_draws, cell_index,
                       rep);
    std::vector<ConditionalSamples> conditionals;
    for (std::size_t j = 0; j < base.mixture.size(); ++j) {
      RngStream cond_rng = draw_rng.fork(j);
      ConditionalSamples cond;
      cond.id = j;
      cond.samples = pareto_tail_sample(base.mixture[j].shape, cond_rng,
                                        *spec.per_conditional);
      conditionals.push_back(std::move(cond));
    }
    RngStream split_rng(spec.seed, stream_purpose::split_partition, cell_index,
                        rep);
    CteResult result =
        cte(conditionals, spec.splits, spec.estimator, split_rng);
    ResultRow row;
    row.scenario = to_string(base.kind);
    row.param = 0.0;
    row.repeat_index = rep;
    row.method = spec.splits == 1 ? "ncte" : "cte";
    row.estimator = to_string(spec.estimator.kind);
    row.ground_truth = scenario_ground_truth(base);
    row.non_positive = !result.positive;
    row.estimate = result.value;
    row.degenerate_count = result.total_degenerate_splits();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tailcross
