#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "tailcross/result.hpp"
#include "tailcross/simulate.hpp"

using namespace tailcross;

TEST_CASE("latent shape field hand value at z=0") {
  const auto field = XiFieldParams::from_xi_max(5.0);
  // ((8 - 21.08)/5.76 + 3.625) / 0.125
  CHECK(xi_z(0.0, field) == Catch::Approx(10.8333333333).epsilon(1e-9));
  CHECK(field.d() == Catch::Approx(0.125));
  CHECK(field.c() == Catch::Approx(3.625));
}

TEST_CASE("latent shape field tends to a constant for large |z|") {
  const auto field = XiFieldParams::from_xi_max(2.0);
  const double limit = (field.a / field.b + field.c()) / field.d();
  CHECK(xi_z(60.0, field) == Catch::Approx(limit).margin(1e-12));
  CHECK(xi_z(-60.0, field) == Catch::Approx(limit).margin(1e-12));
}

TEST_CASE("latent shape field is not even in z") {
  const auto field = XiFieldParams::from_xi_max(1.0);
  CHECK(xi_z(1.0, field) != Catch::Approx(xi_z(-1.0, field)));
}

TEST_CASE("field maximum: constant override and grid refinement") {
  auto flat = XiFieldParams::from_xi_max(3.0);
  flat.n = flat.k = 0.0;
  // With the polynomial frozen at 2m^2 the max sits at z=0.
  CHECK(xi_field_max(flat) == Catch::Approx(xi_z(0.0, flat)));

  const auto field = XiFieldParams::from_xi_max(5.0);
  const double coarse = xi_field_max(field);
  const double fine = xi_field_max(field, -10.0, 10.0, 1e-4);
  CHECK(std::abs(coarse - fine) < 1e-3);
  CHECK(coarse == Catch::Approx(xi_z(0.0, field)).margin(1e-4));
}

TEST_CASE("field maximum is recorded as scenario ground truth") {
  MarginalScenario scenario;
  scenario.kind = ScenarioKind::baseline_5_1;
  scenario.xi_field = XiFieldParams::from_xi_max(5.0);
  CHECK(*scenario_ground_truth(scenario) ==
        Catch::Approx(xi_field_max(scenario.xi_field)));

  MarginalScenario mixture;
  mixture.kind = ScenarioKind::finite_mixture;
  mixture.mixture = {{0.5, 1.0}, {0.5, 0.5}};
  CHECK(*scenario_ground_truth(mixture) == Catch::Approx(1.0));
}

TEST_CASE("conditional draws follow the sign of the shape") {
  RngStream rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double bounded = conditional_draw(-0.5, false, rng);
    CHECK(bounded >= 0.0);
    CHECK(bounded < 2.0);  // GPD(-0.5, 1) upper endpoint
    const double heavy = conditional_draw(2.0, false, rng);
    CHECK(heavy > 1.0);  // Pareto branch support
  }
}

TEST_CASE("shifted draws translate heavy conditionals by xi^-4") {
  RngStream rng(2);
  const double xi = 2.0;
  for (int i = 0; i < 100; ++i) {
    RngStream a = rng.fork(i);
    RngStream b = rng.fork(i);
    const double plain = conditional_draw(xi, false, a);
    const double shifted = conditional_draw(xi, true, b);
    CHECK(shifted - plain == Catch::Approx(std::pow(xi, -4.0)));
  }
  // bounded conditionals are never translated
  RngStream c = rng.fork(1000);
  RngStream d = rng.fork(1000);
  CHECK(conditional_draw(-0.5, true, c) ==
        Catch::Approx(conditional_draw(-0.5, false, d)));
}

TEST_CASE("latent mixture construction") {
  RngStream rng(3);
  const auto mix = make_latent_mixture(rng);
  REQUIRE(mix.components.size() == 30);
  double total = 0.0;
  for (const auto& c : mix.components) {
    CHECK(c.mean >= -5.0);
    CHECK(c.mean <= 5.0);
    CHECK(c.stddev >= 1e-6);
    CHECK(c.stddev <= 4.0);
    total += c.weight;
  }
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("finite mixture scenario validation") {
  MarginalScenario bad;
  bad.kind = ScenarioKind::finite_mixture;
  bad.mixture = {{0.5, 1.0}, {0.4, 0.5}};
  CHECK_THROWS_AS(bad.validate(), domain_error);
  bad.mixture = {{0.5, 1.0}, {0.5, -0.5}};
  CHECK_THROWS_AS(bad.validate(), domain_error);
}

TEST_CASE("pooled experiment rows are deterministic and carry ground truth") {
  MarginalScenario base;
  base.kind = ScenarioKind::baseline_5_1;
  base.xi_field = XiFieldParams::from_xi_max(1.0);
  RunSpec spec;
  spec.pooled_budget = 20000;
  spec.splits = 2;
  spec.repeats = 3;
  spec.estimator = EstimatorConfig{EstimatorKind::dedh, {}, 2};
  spec.seed = 42;

  const auto rows1 = run_pot_experiment(base, spec, 0);
  const auto rows2 = run_pot_experiment(base, spec, 0);
  REQUIRE(rows1.size() == 3);
  std::ostringstream a, b;
  write_result_csv(a, rows1);
  write_result_csv(b, rows2);
  CHECK(a.str() == b.str());
  for (const auto& row : rows1) {
    CHECK(row.method == "pot");
    CHECK(*row.ground_truth ==
          Catch::Approx(xi_field_max(base.xi_field)));
  }
  // repeats can be decomposed via the offset without changing the rows
  RunSpec one = spec;
  one.repeats = 1;
  const auto third = run_pot_experiment(base, one, 0, 2);
  REQUIRE(third.size() == 1);
  CHECK(third[0].estimate == rows1[2].estimate);
  CHECK(third[0].repeat_index == 2);
}

TEST_CASE("cte experiment on the shifted scenario") {
  MarginalScenario base;
  base.kind = ScenarioKind::shifted_5_2;
  base.xi_field = XiFieldParams::from_xi_max(1.0);
  RunSpec spec;
  spec.conditional_count = 10;
  spec.per_conditional = 2000;
  spec.splits = 2;
  spec.repeats = 2;
  spec.estimator = EstimatorConfig{EstimatorKind::dedh, {}, 2};
  spec.seed = 43;

  const auto rows = run_cte_experiment(base, spec, 0);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.method == "cte");
    CHECK(row.scenario == "shifted-5-2");
  }
  const auto again = run_cte_experiment(base, spec, 0);
  CHECK(rows[0].estimate == again[0].estimate);
  CHECK(rows[1].estimate == again[1].estimate);
}

TEST_CASE("run spec validation") {
  RunSpec bad;
  CHECK_THROWS_AS(bad.validate(), domain_error);
  bad.pooled_budget = 100;
  bad.conditional_count = 2;
  bad.per_conditional = 50;
  CHECK_THROWS_AS(bad.validate(), domain_error);
}

TEST_CASE("finite mixture cte rows") {
  MarginalScenario base;
  base.kind = ScenarioKind::finite_mixture;
  base.mixture = {{0.5, 1.0}, {0.5, 0.5}};
  RunSpec spec;
  spec.conditional_count = 2;
  spec.per_conditional = 1000;
  spec.splits = 5;
  spec.repeats = 4;
  spec.estimator = EstimatorConfig{EstimatorKind::pickands, {}, 5};
  spec.seed = 44;
  const auto rows = run_finite_mixture_cte(base, spec);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.method == "cte");
    CHECK(*row.ground_truth == Catch::Approx(1.0));
  }
}

TEST_CASE("marginal sampling covers the analytic scenarios") {
  MarginalScenario ex1;
  ex1.kind = ScenarioKind::appendixB_example1;
  MarginalScenario ex3;
  ex3.kind = ScenarioKind::appendixC_example3;
  RngStream r1(9), r3(10);
  const auto s1 = sample_marginal(ex1, 1000, r1);
  const auto s3 = sample_marginal(ex3, 1000, r3);
  REQUIRE(s1.size() == 1000);
  REQUIRE(s3.size() == 1000);
  for (double x : s1) CHECK(x >= 0.0);
  for (double x : s3) CHECK(x >= 1.0);
}
