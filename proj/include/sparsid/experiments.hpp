#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsid/rng.hpp"
#include "sparsid/sparse_solvers.hpp"
#include "sparsid/truss.hpp"
#include "sparsid/updating.hpp"

namespace sparsid {

/// Stiffness-loss scenario: element ids are 0-based; severity is the
/// fractional reduction, theta_i = 1 - severity.
struct DamageScenario {
  std::vector<std::pair<int, double>> damaged;  // (element id, severity in (0,1))
  std::string label;
};

/// Multiplicative frequency noise: each measured frequency is
/// f_e * (1 + u/100) with u drawn uniformly from [-level_percent, +level_percent].
struct NoiseSpec {
  double level_percent = 0.0;
};

/// One solver column of the Monte Carlo sweep. `l1` selects the
/// noise-bounded L1 solver (epsilon = (level/100) * sqrt(m), the oracle rule)
/// at positive noise and the equality form at level zero; `lp_irls` always
/// runs on the equality system with the noisy residual.
struct MethodSpec {
  SolverMethod solver = SolverMethod::l1_ineq;
  double p = 0.5;  // lp_irls only

  std::string display_name() const;
};

struct MonteCarloConfig {
  DamageScenario scenario;
  std::vector<double> noise_levels;  // percents
  std::vector<int> freq_counts;      // m values
  std::vector<MethodSpec> methods;
  int realizations = 1000;
  std::uint64_t seed = 0;
  SupportThresholds thresholds;
  bool full_iteration = false;  // evaluate success on the iterated solution
  int max_iterations = 20;      // used when full_iteration is set
  int threads = 0;              // 0 = hardware concurrency; result is thread-count independent
};

struct MonteCarloCell {
  std::string method;
  int freq_count = 0;
  double noise_percent = 0.0;
  int successes = 0;
  int solver_failures = 0;  // counted as non-success, never aborting the sweep
  int realizations = 0;

  double rate() const { return static_cast<double>(successes) / realizations; }
};

struct ExperimentReport {
  std::vector<MonteCarloCell> cells;  // method-major, then m, then level
  MonteCarloConfig config;
  double runtime_seconds = 0.0;  // console diagnostics only, not serialized
};

/// Default sweep mirroring the benchmark study: levels {1..5}%, m in {9..12},
/// 1000 realizations, 20% damage on canonical bars 2 and 18.
MonteCarloConfig default_sweep_config();

/// 20% (or custom) two-bar benchmark scenario on canonical bars 2 and 18
/// (1-based labels; stored 0-based).
DamageScenario canonical_two_bar_scenario(double severity);

/// Synthesizes a measurement: builds the truth model from the scenario,
/// solves the m lowest frequencies and perturbs each one multiplicatively.
/// Zero noise returns the exact truth frequencies.
Eigen::VectorXd simulate_measurement(const TrussModel& model, const DamageScenario& scenario,
                                     int m, const NoiseSpec& noise, RngStream& stream);

/// Success metric: the recovered support contains every damaged element and
/// has fewer entries than the number of features used.
bool is_success(const Eigen::VectorXd& x, const DamageScenario& scenario, int m,
                const SupportThresholds& thresholds = {});

/// Runs the sweep. Per-realization streams are keyed by
/// (seed, method index, m, level, realization), so cells are independent and
/// the report is bit-identical for a fixed (config, seed) regardless of
/// thread count or execution order.
ExperimentReport run_monte_carlo(const TrussModel& model, const MonteCarloConfig& config);

/// One row per (iteration, element): the damage estimate after that
/// iteration. The data behind per-element bar charts.
struct DamageStudyRow {
  int iteration = 0;  // 1-based
  int element = 0;    // 0-based
  double damage_estimate = 0.0;
};

struct DamageStudyResult {
  std::vector<DamageStudyRow> rows;
  UpdateResult update;
};

/// Errorless measurement, full updating run, per-iteration damage table.
DamageStudyResult run_damage_study(const TrussModel& model, const DamageScenario& scenario,
                                   int m, const MethodSpec& method, int max_iterations);

}  // namespace sparsid
