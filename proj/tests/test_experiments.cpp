#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sparsid/experiments.hpp"
#include "sparsid/io.hpp"
#include "sparsid/modal.hpp"

using namespace sparsid;

TEST_CASE("simulate_measurement") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);

  SUBCASE("zero noise returns the exact truth frequencies") {
    RngStream stream(1);
    const Eigen::VectorXd measured =
        simulate_measurement(model, scenario, 9, NoiseSpec{0.0}, stream);
    StiffnessParams truth = StiffnessParams::nominal(20);
    truth.theta[1] = truth.theta[17] = 0.8;
    const ModalData modal = solve_model_modes(model, truth, 9);
    CHECK((measured - modal.frequencies).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("five percent noise respects the per-frequency bound") {
    RngStream stream(2);
    const Eigen::VectorXd measured =
        simulate_measurement(model, scenario, 12, NoiseSpec{5.0}, stream);
    RngStream clean(3);
    const Eigen::VectorXd exact =
        simulate_measurement(model, scenario, 12, NoiseSpec{0.0}, clean);
    for (int j = 0; j < 12; ++j)
      CHECK(std::abs(measured[j] / exact[j] - 1.0) <= 0.05 + 1e-15);
  }
  SUBCASE("identical streams give identical measurements") {
    RngStream a(42), b(42);
    const Eigen::VectorXd ma = simulate_measurement(model, scenario, 10, NoiseSpec{3.0}, a);
    const Eigen::VectorXd mb = simulate_measurement(model, scenario, 10, NoiseSpec{3.0}, b);
    CHECK((ma - mb).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("scenario validation") {
    DamageScenario bad;
    bad.damaged = {{99, 0.2}};
    RngStream stream(4);
    CHECK_THROWS_AS(simulate_measurement(model, bad, 9, NoiseSpec{0.0}, stream),
                    std::invalid_argument);
    bad.damaged = {{1, 1.5}};
    CHECK_THROWS_AS(simulate_measurement(model, bad, 9, NoiseSpec{0.0}, stream),
                    std::invalid_argument);
  }
}

TEST_CASE("is_success follows the two-part localization metric") {
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(20);

  SUBCASE("exact truth support succeeds") {
    x[1] = -0.2;
    x[17] = -0.2;
    CHECK(is_success(x, scenario, 9));
  }
  SUBCASE("a spurious extra entry still counts as localized") {
    x[1] = -0.2;
    x[17] = -0.2;
    x[14] = -0.05;  // spurious bar 15
    CHECK(is_success(x, scenario, 9));
  }
  SUBCASE("wrong support fails") {
    x[4] = -0.2;
    x[6] = -0.2;
    CHECK_FALSE(is_success(x, scenario, 9));
  }
  SUBCASE("too many nonzeros fail even when the truth is contained") {
    x[1] = -0.2;
    x[17] = -0.2;
    for (int e = 0; e < 7; ++e) x[2 + e] = -0.1;
    CHECK_FALSE(is_success(x, scenario, 9));
  }
}

TEST_CASE("noiseless Monte Carlo cell reproduces the fixture at rate 1") {
  const TrussModel model = canonical_truss();
  MonteCarloConfig config;
  config.scenario = canonical_two_bar_scenario(0.20);
  config.noise_levels = {0.0};
  config.freq_counts = {fixtures::kBenchmarkFeatureCount};
  config.methods = {{SolverMethod::l1_ineq, 0.5}};
  config.realizations = 5;
  config.seed = 7;
  const ExperimentReport report = run_monte_carlo(model, config);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].rate() == doctest::Approx(1.0));
  CHECK(report.cells[0].solver_failures == 0);
}

TEST_CASE("reports are identical across reruns and thread counts") {
  const TrussModel model = canonical_truss();
  MonteCarloConfig config;
  config.scenario = canonical_two_bar_scenario(0.20);
  config.noise_levels = {1.0, 3.0};
  config.freq_counts = {9, 10};
  config.methods = {{SolverMethod::l1_ineq, 0.5}, {SolverMethod::lp_irls, 0.5}};
  config.realizations = 10;
  config.seed = 123;

  config.threads = 1;
  const std::string serial_csv = report_to_csv(run_monte_carlo(model, config));
  const std::string serial_json = report_to_json_text(run_monte_carlo(model, config));
  config.threads = 4;
  const ExperimentReport parallel = run_monte_carlo(model, config);
  CHECK(report_to_csv(parallel) == serial_csv);
  CHECK(report_to_json_text(parallel) == serial_json);
}

TEST_CASE("the seed drives the measurement streams") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  RngStream a(stream_key({1, 0}));
  RngStream b(stream_key({2, 0}));
  const Eigen::VectorXd ma = simulate_measurement(model, scenario, 9, NoiseSpec{3.0}, a);
  const Eigen::VectorXd mb = simulate_measurement(model, scenario, 9, NoiseSpec{3.0}, b);
  CHECK((ma - mb).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("run_damage_study emits one row per iteration and element") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  const DamageStudyResult study =
      run_damage_study(model, scenario, fixtures::kBenchmarkFeatureCount,
                       {SolverMethod::l1_eq, 0.5}, 20);
  REQUIRE(study.update.converged);
  CHECK(static_cast<int>(study.rows.size()) == study.update.iterations_used * 20);
  // Final iteration rows carry the converged damage estimates.
  const int last = study.update.iterations_used;
  for (const DamageStudyRow& row : study.rows) {
    if (row.iteration != last) continue;
    if (row.element == 1 || row.element == 17)
      CHECK(row.damage_estimate == doctest::Approx(0.20).epsilon(0.01));
    else
      CHECK(std::abs(row.damage_estimate) < 0.01);
  }
}

TEST_CASE("sweep config validation") {
  const TrussModel model = canonical_truss();
  MonteCarloConfig config = default_sweep_config();
  config.realizations = 0;
  CHECK_THROWS_AS(run_monte_carlo(model, config), std::invalid_argument);
  config = default_sweep_config();
  config.freq_counts = {99};
  CHECK_THROWS_AS(run_monte_carlo(model, config), std::invalid_argument);
}
