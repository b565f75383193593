#pragma once

#include <string>

#include "sparsid/experiments.hpp"
#include "sparsid/sparse_solvers.hpp"
#include "sparsid/updating.hpp"

namespace sparsid {

// Sparse problem documents: dense row-major A, vector b, optional epsilon
// and sign constraint. Lets systems dumped by the sensitivity module be
// solved standalone.
SparseProblem problem_from_json_text(const std::string& text);
SparseProblem load_problem(const std::string& path);
std::string problem_to_json_text(const SparseProblem& problem);

std::string solution_to_json_text(const SparseSolution& solution);
std::string solution_to_csv(const SparseSolution& solution);

// Scenario documents: {"damaged": [{"element": <1-based bar label>,
// "severity": s}], "label": "..."}. Element labels follow the canonical
// 1-based bar numbering used in docs and CLI output; they are converted to
// 0-based internal ids on load.
DamageScenario scenario_from_json_text(const std::string& text);
DamageScenario load_scenario(const std::string& path);
std::string scenario_to_json_text(const DamageScenario& scenario);

// Sweep configuration mirroring MonteCarloConfig.
MonteCarloConfig sweep_config_from_json_text(const std::string& text);
MonteCarloConfig load_sweep_config(const std::string& path);
std::string sweep_config_to_json_text(const MonteCarloConfig& config);

// Monte Carlo reports. CSV schema:
//   method,m,noise_pct,successes,realizations,rate
// JSON adds per-cell solver-failure tallies and the full config echo.
// Neither form includes wall-clock timing, so reruns under a fixed seed are
// byte-identical.
std::string report_to_csv(const ExperimentReport& report);
std::string report_to_json_text(const ExperimentReport& report);

// Damage study tables. CSV schema: iteration,element,damage_estimate
// (element labels 1-based).
std::string study_to_csv(const DamageStudyResult& study);
std::string study_to_json_text(const DamageStudyResult& study);

// Update results (identify command). CSV = per-iteration damage table with
// the same schema as study tables; JSON carries the full history.
std::string update_result_to_csv(const UpdateResult& result);
std::string update_result_to_json_text(const UpdateResult& result);

// Measured-frequency files: plain text, one Hz value per line, ascending.
Eigen::VectorXd load_frequencies(const std::string& path);
std::string frequencies_to_text(const Eigen::VectorXd& frequencies);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace sparsid
