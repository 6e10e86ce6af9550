// tailcross: tail-shape estimation experiments from the command line.
//
// Subcommands: estimate, simulate, experiment, plot.
// Exit codes: 0 success, 1 estimation failed, 2 usage/parse error.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tailcross/cte.hpp"
#include "tailcross/distributions.hpp"
#include "tailcross/errors.hpp"
#include "tailcross/estimators.hpp"
#include "tailcross/models.hpp"
#include "tailcross/parallel.hpp"
#include "tailcross/result.hpp"
#include "tailcross/rng.hpp"
#include "tailcross/simulate.hpp"
#include "tailcross/svg.hpp"

namespace tc = tailcross;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TAILCROSS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw tc::parse_error("TAILCROSS_SEED is not an unsigned integer");
    }
  }
  return 0;
}

std::vector<double> parse_reals(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(tc::detail::parse_real(tok, 0));
  }
  return out;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const json& flags) {
  json manifest;
  manifest["tool"] = "tailcross";
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["flags"] = flags;
  std::ofstream os(out_path + ".manifest.json");
  os << manifest.dump(2) << '\n';
}

void write_rows(const std::string& out_path,
                const std::vector<tc::ResultRow>& rows) {
  if (out_path.empty() || out_path == "-") {
    tc::write_result_csv(std::cout, rows);
    return;
  }
  std::ofstream os(out_path, std::ios::binary);
  if (!os) throw tc::parse_error("cannot open output file: " + out_path);
  tc::write_result_csv(os, rows);
}

tc::EstimatorConfig make_config(const std::string& estimator, double k_frac,
                                std::size_t splits) {
  tc::EstimatorConfig config;
  config.kind = tc::estimator_from_string(estimator);
  if (k_frac > 0.0) config.k_rule.fraction = k_frac;
  config.splits = splits;
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
  std::string data;
  std::string method = "pot";
  std::string estimator = "dedh";
  double k_frac = 0.0;
  std::size_t splits = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  std::ifstream is(a.data);
  if (!is) throw tc::parse_error("cannot open samples file: " + a.data);
  const auto pairs = tc::read_samples_csv(is);
  std::map<std::size_t, std::vector<double>> groups;
  for (const auto& [gid, value] : pairs) groups[gid].push_back(value);

  const tc::EstimatorConfig config =
      make_config(a.estimator, a.k_frac, a.splits);
  std::vector<tc::ResultRow> rows;

  auto group_row = [&](std::size_t gid, const std::vector<double>& samples,
                       const std::string& method, double value,
                       bool non_positive, std::size_t degenerate) {
    tc::ResultRow row;
    row.scenario = "group-" + std::to_string(gid);
    row.param = tc::empirical_threshold(samples, 0.97);
    row.method = method;
    row.estimator = a.estimator;
    row.non_positive = non_positive;
    row.estimate = value;
    row.degenerate_count = degenerate;
    return row;
  };

  if (a.method == "pot" || groups.size() == 1) {
    std::vector<double> pooled;
    for (const auto& [gid, samples] : groups)
      pooled.insert(pooled.end(), samples.begin(), samples.end());
    tc::RngStream rng(a.seed, tc::stream_purpose::split_partition);
    tc::SplitResult sr = tc::split_average(pooled, config, rng);
    rows.push_back(group_row(0, pooled, a.method == "pot" ? "pot" : a.method,
                             sr.estimate.value, false, sr.degenerate_groups));
  } else if (a.method == "cte" || a.method == "ncte") {
    std::vector<tc::ConditionalSamples> conditionals;
    for (const auto& [gid, samples] : groups)
      conditionals.push_back({gid, samples});
    tc::RngStream rng(a.seed, tc::stream_purpose::split_partition);
    const std::size_t p = a.method == "ncte" ? 1 : config.splits;
    tc::CteResult result = tc::cte(conditionals, p, config, rng);
    for (const auto& ce : result.conditionals) {
      if (ce.failed) continue;
      rows.push_back(group_row(ce.id, groups.at(ce.id), a.method, ce.estimate,
                               false, ce.degenerate_splits));
    }
    tc::ResultRow verdict;
    verdict.scenario = "verdict";
    verdict.method = a.method;
    verdict.estimator = a.estimator;
    verdict.non_positive = !result.positive;
    verdict.estimate = result.value;
    verdict.degenerate_count = result.total_degenerate_splits();
    rows.push_back(verdict);
  } else {
    throw tc::parse_error("unknown method: " + a.method);
  }

  write_rows(a.out, rows);
  if (!a.out.empty() && a.out != "-")
    write_manifest(a.out, "estimate",
                   json{{"data", a.data},
                        {"method", a.method},
                        {"estimator", a.estimator},
                        {"k-frac", a.k_frac},
                        {"splits", a.splits},
                        {"seed", a.seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario = "baseline-5-1";
  std::vector<double> xi_max_grid;
  std::size_t M = 0;
  std::size_t K = 0;
  std::size_t N = 0;
  std::size_t p = 1;
  std::size_t repeats = 1;
  std::string estimator = "dedh";
  double k_frac = 0.0;
  std::string weights;
  std::string shapes;
  std::uint64_t seed = 0;
  std::size_t parallelism = 0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const tc::ScenarioKind kind = tc::scenario_from_string(a.scenario);
  tc::MarginalScenario base;
  base.kind = kind;
  if (kind == tc::ScenarioKind::finite_mixture) {
    const auto w = parse_reals(a.weights);
    const auto s = parse_reals(a.shapes);
    if (w.size() != s.size() || w.empty())
      throw tc::parse_error("--weights and --shapes must list equal counts");
    for (std::size_t i = 0; i < w.size(); ++i)
      base.mixture.push_back({w[i], s[i]});
    base.validate();
  }

  std::vector<double> grid = a.xi_max_grid;
  const bool field_scenario = kind == tc::ScenarioKind::baseline_5_1 ||
                              kind == tc::ScenarioKind::shifted_5_2;
  if (grid.empty()) grid = field_scenario ? std::vector<double>{0.0}
                                          : std::vector<double>{0.0};
  if (!field_scenario) grid = {0.0};  // cell grid only applies to the field

  tc::RunSpec spec;
  if (a.M > 0) {
    spec.pooled_budget = a.M;
  } else if (a.K > 0 && a.N > 0) {
    spec.conditional_count = a.K;
    spec.per_conditional = a.N;
  } else {
    throw tc::parse_error("set either --M or both --K and --N");
  }
  spec.splits = a.p;
  spec.repeats = 1;  // one repeat per parallel job
  spec.estimator = make_config(a.estimator, a.k_frac, a.p);
  spec.seed = a.seed;

  const std::size_t cells = grid.size();
  const std::size_t jobs = cells * a.repeats;
  const std::size_t par =
      a.parallelism > 0 ? a.parallelism
                        : std::max(1u, std::thread::hardware_concurrency());

  auto run_job = [&](std::size_t j) -> std::vector<tc::ResultRow> {
    const std::size_t cell = j / a.repeats;
    const std::size_t rep = j % a.repeats;
    tc::MarginalScenario cell_scenario = base;
    if (field_scenario)
      cell_scenario.xi_field = tc::XiFieldParams::from_xi_max(grid[cell]);
    if (spec.pooled_budget)
      return tc::run_pot_experiment(cell_scenario, spec, cell, rep);
    if (kind == tc::ScenarioKind::finite_mixture)
      return tc::run_finite_mixture_cte(cell_scenario, spec, cell, rep);
    return tc::run_cte_experiment(cell_scenario, spec, cell, rep);
  };
  const auto tables =
      tc::parallel_map<std::vector<tc::ResultRow>>(jobs, par, run_job);

  std::vector<tc::ResultRow> rows;
  for (const auto& t : tables) rows.insert(rows.end(), t.begin(), t.end());
  write_rows(a.out, rows);
  if (!a.out.empty() && a.out != "-")
    write_manifest(a.out, "simulate",
                   json{{"scenario", a.scenario},
                        {"xi-max-grid", grid},
                        {"M", a.M},
                        {"K", a.K},
                        {"N", a.N},
                        {"p", a.p},
                        {"repeats", a.repeats},
                        {"estimator", a.estimator},
                        {"k-frac", a.k_frac},
                        {"weights", a.weights},
                        {"shapes", a.shapes},
                        {"seed", a.seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

struct ExperimentArgs {
  std::string model = "gp";
  std::string data;
  std::string synthetic = "ar1";
  std::size_t series_length = 2002;
  std::string length_scales = "0.1,0.3,1,3,10";
  std::string degrees = "1,2,3,4,5,6,7,8,9";
  std::size_t train_size = 340;
  std::size_t draws = 100;
  std::size_t splits = 5;
  std::size_t repeats = 1;
  std::string estimator = "dedh";
  double k_frac = 0.0;
  std::uint64_t seed = 0;
  std::size_t parallelism = 0;
  std::string out;
};

std::vector<double> load_series(const ExperimentArgs& a) {
  if (!a.data.empty()) {
    std::ifstream is(a.data);
    if (!is) throw tc::parse_error("cannot open data file: " + a.data);
    const auto pairs = tc::read_samples_csv(is);
    std::vector<double> series;
    series.reserve(pairs.size());
    for (const auto& [gid, value] : pairs) series.push_back(value);
    return series;
  }
  tc::RngStream rng(a.seed, 100);
  if (a.synthetic == "ar1") return tc::ar1_series(a.series_length, 0.9, rng);
  if (a.synthetic == "sine")
    return tc::sine_noise_series(a.series_length, 50.0, 0.3, rng);
  throw tc::parse_error("unknown synthetic series: " + a.synthetic);
}

int run_experiment(const ExperimentArgs& a) {
  const std::vector<double> series = load_series(a);
  const tc::Dataset data = tc::window(series, 2);

  std::vector<double> sweep;
  if (a.model == "gp")
    sweep = parse_reals(a.length_scales);
  else if (a.model == "poly")
    sweep = parse_reals(a.degrees);
  else
    throw tc::parse_error("unknown model: " + a.model);
  if (sweep.empty()) throw tc::parse_error("empty sweep grid");

  tc::HarnessConfig hc;
  hc.train_size = a.train_size;
  hc.draws = a.draws;
  hc.estimator = make_config(a.estimator, a.k_frac, a.splits);

  const std::size_t jobs = sweep.size() * a.repeats;
  const std::size_t par =
      a.parallelism > 0 ? a.parallelism
                        : std::max(1u, std::thread::hardware_concurrency());

  auto run_job = [&](std::size_t j) -> std::vector<tc::ResultRow> {
    const std::size_t cell = j / a.repeats;
    const std::size_t rep = j % a.repeats;
    const double param = sweep[cell];
    tc::Trainer trainer;
    if (a.model == "gp") {
      trainer = [param](const tc::Dataset& train) {
        tc::GpModel m = tc::gp_fit(train, param);
        return [m](const Eigen::MatrixXd& X) { return m.predict(X); };
      };
    } else {
      trainer = [param](const tc::Dataset& train) {
        tc::KrrModel m = tc::krr_fit(train, static_cast<unsigned>(param));
        return [m](const Eigen::MatrixXd& X) { return m.predict(X); };
      };
    }
    tc::RngStream rng(a.seed, 101, cell, rep);
    tc::HarnessResult hr = tc::prediction_tail_harness(data, trainer, hc, rng);
    std::vector<tc::ResultRow> rows;
    tc::ResultRow cte_row;
    cte_row.scenario = a.model;
    cte_row.param = param;
    cte_row.repeat_index = rep;
    cte_row.method = "cte";
    cte_row.estimator = a.estimator;
    cte_row.non_positive = !hr.cte.positive;
    cte_row.estimate = hr.cte.value;
    cte_row.mse = hr.mean_mse;
    cte_row.degenerate_count = hr.cte.total_degenerate_splits();
    rows.push_back(cte_row);
    tc::ResultRow pot_row;
    pot_row.scenario = a.model;
    pot_row.param = param;
    pot_row.repeat_index = rep;
    pot_row.method = "pot";
    pot_row.estimator = a.estimator;
    pot_row.estimate = hr.pooled.estimate.value;
    pot_row.mse = hr.mean_mse;
    pot_row.degenerate_count = hr.pooled.degenerate_groups;
    rows.push_back(pot_row);
    return rows;
  };
  const auto tables =
      tc::parallel_map<std::vector<tc::ResultRow>>(jobs, par, run_job);
  std::vector<tc::ResultRow> rows;
  for (const auto& t : tables) rows.insert(rows.end(), t.begin(), t.end());
  write_rows(a.out, rows);
  if (!a.out.empty() && a.out != "-")
    write_manifest(a.out, "experiment",
                   json{{"model", a.model},
                        {"data", a.data},
                        {"synthetic", a.synthetic},
                        {"series-length", a.series_length},
                        {"length-scales", a.length_scales},
                        {"degrees", a.degrees},
                        {"train-size", a.train_size},
                        {"draws", a.draws},
                        {"splits", a.splits},
                        {"repeats", a.repeats},
                        {"estimator", a.estimator},
                        {"seed", a.seed}});
  return 0;
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

struct PlotArgs {
  std::string data;
  std::string kind = "grid-lines";
  std::string out;
};

int run_plot(const PlotArgs& a) {
  std::ifstream is(a.data);
  if (!is) throw tc::parse_error("cannot open results file: " + a.data);
  const auto rows = tc::read_result_csv(is);
  if (rows.empty()) throw tc::parse_error("results file has no rows");
  std::ofstream os(a.out, std::ios::binary);
  if (!os) throw tc::parse_error("cannot open output file: " + a.out);
  tc::write_plot_svg(os, rows, tc::plot_kind_from_string(a.kind));
  write_manifest(a.out, "plot", json{{"data", a.data}, {"kind", a.kind}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-shape estimation experiments"};
  app.require_subcommand(1);

  EstimateArgs ea;
  SimulateArgs sa;
  ExperimentArgs xa;
  PlotArgs pa;

  try {
    ea.seed = sa.seed = xa.seed = default_seed();
  } catch (const tc::parse_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  auto* est = app.add_subcommand("estimate", "estimate tail shape from a CSV");
  est->add_option("--data", ea.data, "samples CSV (value, or group-id,value)")
      ->required();
  est->add_option("--method", ea.method, "pot | cte | ncte");
  est->add_option("--estimator", ea.estimator, "pickands | dedh");
  est->add_option("--k-frac", ea.k_frac, "top-order-statistic fraction");
  est->add_option("--p,--splits", ea.splits, "split-averaging groups");
  est->add_option("--seed", ea.seed, "random seed");
  est->add_option("--out", ea.out, "output CSV ('-' for stdout)");

  auto* sim = app.add_subcommand("simulate", "run a simulation scenario");
  sim->add_option("--scenario", sa.scenario,
                  "baseline-5-1 | shifted-5-2 | finite-mixture | "
                  "appendixB-example1 | appendixC-example3");
  sim->add_option("--xi-max", sa.xi_max_grid, "field cell(s), repeatable");
  sim->add_option("--xi-max-grid", sa.xi_max_grid, "field cells (list)");
  sim->add_option("--M", sa.M, "pooled sample budget per repeat");
  sim->add_option("--K", sa.K, "number of conditionals");
  sim->add_option("--N,--n", sa.N, "samples per conditional");
  sim->add_option("--p", sa.p, "split-averaging groups");
  sim->add_option("--repeats", sa.repeats, "independent repeats per cell");
  sim->add_option("--estimator", sa.estimator, "pickands | dedh");
  sim->add_option("--k-frac", sa.k_frac, "top-order-statistic fraction");
  sim->add_option("--weights", sa.weights, "finite-mixture weights (list)");
  sim->add_option("--shapes", sa.shapes, "finite-mixture shapes (list)");
  sim->add_option("--seed", sa.seed, "random seed");
  sim->add_option("--parallelism", sa.parallelism, "worker threads");
  sim->add_option("--out", sa.out, "output CSV ('-' for stdout)");

  auto* exp = app.add_subcommand("experiment", "regression prediction-tail sweep");
  exp->add_option("--model", xa.model, "gp | poly");
  exp->add_option("--data", xa.data, "univariate series CSV");
  exp->add_option("--synthetic", xa.synthetic, "ar1 | sine (when no --data)");
  exp->add_option("--series-length", xa.series_length, "synthetic length");
  exp->add_option("--length-scales", xa.length_scales, "gp sweep (list)");
  exp->add_option("--degrees", xa.degrees, "poly sweep (list)");
  exp->add_option("--train-size", xa.train_size, "training subset size");
  exp->add_option("--draws", xa.draws, "training-set draws per cell");
  exp->add_option("--splits", xa.splits, "split-averaging groups");
  exp->add_option("--repeats", xa.repeats, "repeats per sweep cell");
  exp->add_option("--estimator", xa.estimator, "pickands | dedh");
  exp->add_option("--k-frac", xa.k_frac, "top-order-statistic fraction");
  exp->add_option("--seed", xa.seed, "random seed");
  exp->add_option("--parallelism", xa.parallelism, "worker threads");
  exp->add_option("--out", xa.out, "output CSV ('-' for stdout)");

  auto* plt = app.add_subcommand("plot", "render a results CSV as SVG");
  plt->add_option("--data", pa.data, "results CSV")->required();
  plt->add_option("--kind", pa.kind,
                  "grid-lines | mse-overlay | threshold-scatter");
  plt->add_option("--out", pa.out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (est->parsed()) return run_estimate(ea);
    if (sim->parsed()) return run_simulate(sa);
    if (exp->parsed()) return run_experiment(xa);
    if (plt->parsed()) return run_plot(pa);
  } catch (const tc::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const tc::estimation_failed_error& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return 1;
  } catch (const tc::insufficient_samples_error& e) {
    std::cerr << "estimation failed: " << e.what() << '\n';
    return 1;
  } catch (const tc::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
