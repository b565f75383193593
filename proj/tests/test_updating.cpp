#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sparsid/experiments.hpp"
#include "sparsid/modal.hpp"
#include "sparsid/updating.hpp"

using namespace sparsid;

namespace {

Eigen::VectorXd errorless_measurement(const TrussModel& model, const DamageScenario& scenario,
                                      int m) {
  RngStream unused(0);
  return simulate_measurement(model, scenario, m, NoiseSpec{0.0}, unused);
}

double max_damage_error(const UpdateResult& result, const DamageScenario& scenario) {
  double worst = 0.0;
  for (const auto& [element, severity] : scenario.damaged)
    worst = std::max(worst, std::abs(result.damage_estimates[element] - severity));
  return worst;
}

}  // namespace

TEST_CASE("healthy measurement converges immediately with zero damage") {
  const TrussModel model = canonical_truss();
  const ModalData nominal = solve_model_modes(model, StiffnessParams::nominal(20), 9);

  for (SolverMethod method :
       {SolverMethod::l0, SolverMethod::l1_eq, SolverMethod::l1_ineq, SolverMethod::lp_irls}) {
    UpdateConfig config;
    config.method = method;
    config.feature_count = 9;
    config.epsilon = 0.01;  // only used by l1_ineq
    const UpdateResult result = run_update(model, nominal.frequencies, config);
    CHECK(result.converged);
    CHECK(result.iterations_used == 1);
    CHECK(result.damage_estimates.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(result.per_iteration.front().step.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("benchmark 20% two-bar damage is localized and quantified") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  const Eigen::VectorXd measured =
      errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);

  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = fixtures::kBenchmarkFeatureCount;
  const UpdateResult result = run_update(model, measured, config);

  CHECK(result.converged);
  CHECK(result.iterations_used <= 10);
  CHECK(result.per_iteration.back().support == std::vector<int>{1, 17});
  CHECK(max_damage_error(result, scenario) <= 0.01 * 0.20);
  // Off-support entries stay at iteration noise level.
  for (int e = 0; e < 20; ++e) {
    if (e == 1 || e == 17) continue;
    CHECK(std::abs(result.damage_estimates[e]) < 0.01);
  }
}

TEST_CASE("one_shot equals run_update with a single iteration") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  const Eigen::VectorXd measured =
      errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);

  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = fixtures::kBenchmarkFeatureCount;
  UpdateConfig single = config;
  single.max_iterations = 1;

  const UpdateResult a = one_shot(model, measured, config);
  const UpdateResult b = run_update(model, measured, single);
  CHECK(a.iterations_used == 1);
  CHECK((a.damage_estimates - b.damage_estimates).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("iterations refine the magnitudes the one-shot solve underestimates") {
  const TrussModel model = canonical_truss();
  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = fixtures::kBenchmarkFeatureCount;

  SUBCASE("20% damage: same support, better magnitudes") {
    const DamageScenario scenario = canonical_two_bar_scenario(0.20);
    const Eigen::VectorXd measured =
        errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);
    const UpdateResult once = one_shot(model, measured, config);
    const UpdateResult full = run_update(model, measured, config);
    CHECK(once.per_iteration.back().support == full.per_iteration.back().support);
    CHECK(max_damage_error(full, scenario) < max_damage_error(once, scenario));
  }
  SUBCASE("50% damage: the nonlinear terms hurt the one-shot estimate more") {
    const DamageScenario strong = canonical_two_bar_scenario(0.50);
    const DamageScenario mild = canonical_two_bar_scenario(0.20);
    const Eigen::VectorXd measured_strong =
        errorless_measurement(model, strong, fixtures::kBenchmarkFeatureCount);
    const Eigen::VectorXd measured_mild =
        errorless_measurement(model, mild, fixtures::kBenchmarkFeatureCount);

    const UpdateResult once_strong = one_shot(model, measured_strong, config);
    const UpdateResult full_strong = run_update(model, measured_strong, config);
    CHECK(max_damage_error(once_strong, strong) > max_damage_error(full_strong, strong));

    const UpdateResult once_mild = one_shot(model, measured_mild, config);
    CHECK(max_damage_error(once_strong, strong) > max_damage_error(once_mild, mild));
  }
}

TEST_CASE("residual norm decreases across iterations on the noiseless benchmark") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.20);
  const Eigen::VectorXd measured =
      errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);

  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = fixtures::kBenchmarkFeatureCount;
  const UpdateResult result = run_update(model, measured, config);
  REQUIRE(result.converged);
  for (std::size_t k = 1; k < result.per_iteration.size(); ++k)
    CHECK(result.per_iteration[k].residual_norm_before <
          result.per_iteration[k - 1].residual_norm_before);
}

TEST_CASE("support stays fixed after the first iteration on the benchmark fixtures") {
  const TrussModel model = canonical_truss();
  UpdateConfig config;
  config.feature_count = fixtures::kBenchmarkFeatureCount;
  for (double severity : {0.20, 0.50}) {
    const DamageScenario scenario = canonical_two_bar_scenario(severity);
    const Eigen::VectorXd measured =
        errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);
    for (SolverMethod method : {SolverMethod::l1_eq, SolverMethod::lp_irls}) {
      config.method = method;
      const UpdateResult result = run_update(model, measured, config);
      CHECK_FALSE(result.support_changed_after_first);
    }
  }
}

TEST_CASE("theta is clamped at the floor and never goes non-finite") {
  const TrussModel model = canonical_truss();
  DamageScenario extreme;
  extreme.damaged = {{1, 0.97}, {17, 0.97}};
  extreme.label = "near-total damage";
  const Eigen::VectorXd measured = errorless_measurement(model, extreme, 9);

  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = 9;
  config.max_iterations = 30;
  const UpdateResult result = run_update(model, measured, config);
  CHECK(result.theta_final.theta.minCoeff() >= config.theta_floor);
  CHECK(result.theta_final.theta.allFinite());
}

TEST_CASE("hitting the iteration cap reports non-convergence with full history") {
  const TrussModel model = canonical_truss();
  const DamageScenario scenario = canonical_two_bar_scenario(0.50);
  const Eigen::VectorXd measured =
      errorless_measurement(model, scenario, fixtures::kBenchmarkFeatureCount);

  UpdateConfig config;
  config.method = SolverMethod::l1_eq;
  config.feature_count = fixtures::kBenchmarkFeatureCount;
  config.max_iterations = 2;
  const UpdateResult result = run_update(model, measured, config);
  CHECK_FALSE(result.converged);
  CHECK(result.iterations_used == 2);
  CHECK(result.per_iteration.size() == 2);
}

TEST_CASE("config validation") {
  const TrussModel model = canonical_truss();
  const Eigen::VectorXd measured = Eigen::VectorXd::LinSpaced(9, 10.0, 90.0);
  UpdateConfig config;
  config.feature_count = 9;

  SUBCASE("measured vector too short") {
    UpdateConfig wide = config;
    wide.feature_count = 12;
    CHECK_THROWS_AS(run_update(model, measured, wide), std::invalid_argument);
  }
  SUBCASE("l1_ineq needs a bound") {
    UpdateConfig ineq = config;
    ineq.method = SolverMethod::l1_ineq;
    CHECK_THROWS_AS(run_update(model, measured, ineq), std::invalid_argument);
  }
  SUBCASE("bad theta floor") {
    UpdateConfig bad = config;
    bad.theta_floor = 0.0;
    CHECK_THROWS_AS(run_update(model, measured, bad), std::invalid_argument);
  }
}
