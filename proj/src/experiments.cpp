#include "sparsid/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sparsid/modal.hpp"

namespace sparsid {

namespace {

void check_scenario(const TrussModel& model, const DamageScenario& scenario) {
  for (const auto& [element, severity] : scenario.damaged) {
    if (element < 0 || element >= model.element_count())
      throw std::invalid_argument("scenario references unknown element " +
                                  std::to_string(element));
    if (!(severity > 0.0 && severity < 1.0))
      throw std::invalid_argument("damage severity must lie in (0, 1)");
  }
}

StiffnessParams truth_params(const TrussModel& model, const DamageScenario& scenario) {
  StiffnessParams params = StiffnessParams::nominal(model.element_count());
  for (const auto& [element, severity] : scenario.damaged) params.theta[element] = 1.0 - severity;
  return params;
}

}  // namespace

std::string MethodSpec::display_name() const {
  switch (solver) {
    case SolverMethod::l1_ineq:
      return "l1";  // the noise-bounded L1 column of the sweep
    case SolverMethod::lp_irls: {
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "lp%g", p);
      return buffer;
    }
    default:
      return method_name(solver);
  }
}

DamageScenario canonical_two_bar_scenario(double severity) {
  DamageScenario scenario;
  scenario.damaged = {{1, severity}, {17, severity}};  // canonical bars 2 and 18
  char label[64];
  std::snprintf(label, sizeof(label), "%g%% damage, bars 2 & 18", severity * 100.0);
  scenario.label = label;
  return scenario;
}

MonteCarloConfig default_sweep_config() {
  MonteCarloConfig config;
  config.scenario = canonical_two_bar_scenario(0.20);
  config.noise_levels = {1.0, 2.0, 3.0, 4.0, 5.0};
  config.freq_counts = {9, 10, 11, 12};
  config.methods = {{SolverMethod::l1_ineq, 0.5}, {SolverMethod::lp_irls, 0.5}};
  config.realizations = 1000;
  config.seed = 0;
  return config;
}

Eigen::VectorXd simulate_measurement(const TrussModel& model, const DamageScenario& scenario,
                                     int m, const NoiseSpec& noise, RngStream& stream) {
  check_scenario(model, scenario);
  if (noise.level_percent < 0) throw std::invalid_argument("noise level must be nonnegative");

  const ModalData truth = solve_model_modes(model, truth_params(model, scenario), m);
  if (noise.level_percent == 0.0) return truth.frequencies;

  Eigen::VectorXd measured(m);
  for (int j = 0; j < m; ++j) {
    const double u = stream.next_symmetric(noise.level_percent);
    measured[j] = truth.frequencies[j] * (1.0 + u / 100.0);
    if (std::abs(measured[j] / truth.frequencies[j] - 1.0) >
        noise.level_percent / 100.0 + 1e-15)
      throw std::logic_error("noise bound violated in measurement generator");
  }
  return measured;
}

bool is_success(const Eigen::VectorXd& x, const DamageScenario& scenario, int m,
                const SupportThresholds& thresholds) {
  const std::vector<int> found = support(x, thresholds.tau_rel, thresholds.tau_abs);
  if (static_cast<int>(found.size()) >= m) return false;
  for (const auto& [element, severity] : scenario.damaged) {
    (void)severity;
    if (std::find(found.begin(), found.end(), element) == found.end()) return false;
  }
  return true;
}

namespace {

MonteCarloCell run_cell(const TrussModel& model, const MonteCarloConfig& config,
                        std::size_t method_index, int m, double level) {
  const MethodSpec& spec = config.methods[method_index];

  MonteCarloCell cell;
  cell.method = spec.display_name();
  cell.freq_count = m;
  cell.noise_percent = level;
  cell.realizations = config.realizations;

  UpdateConfig update;
  update.method = spec.solver;
  update.feature_count = m;
  update.assumed_noise_percent = level;  // oracle rule: the generator's level
  update.p = spec.p;
  update.thresholds = config.thresholds;
  update.max_iterations = config.full_iteration ? config.max_iterations : 1;

  const NoiseSpec noise{level};
  for (int r = 0; r < config.realizations; ++r) {
    RngStream stream(stream_key({config.seed, static_cast<std::uint64_t>(method_index),
                                 static_cast<std::uint64_t>(m),
                                 std::bit_cast<std::uint64_t>(level),
                                 static_cast<std::uint64_t>(r)}));
    try {
      const Eigen::VectorXd measured =
          simulate_measurement(model, config.scenario, m, noise, stream);
      const UpdateResult result = config.full_iteration
                                      ? run_update(model, measured, update)
                                      : one_shot(model, measured, update);
      // Localization is judged on the theta-change vector.
      const Eigen::VectorXd x = result.theta_final.theta - Eigen::VectorXd::Ones(
                                                               model.element_count());
      if (is_success(x, config.scenario, m, config.thresholds)) ++cell.successes;
    } catch (const std::exception&) {
      ++cell.solver_failures;  // counted as non-success, sweep continues
    }
  }
  return cell;
}

}  // namespace

ExperimentReport run_monte_carlo(const TrussModel& model, const MonteCarloConfig& config) {
  if (config.realizations < 1) throw std::invalid_argument("realizations must be >= 1");
  if (config.methods.empty() || config.freq_counts.empty() || config.noise_levels.empty())
    throw std::invalid_argument("sweep requires methods, freq_counts and noise_levels");
  check_scenario(model, config.scenario);
  for (int m : config.freq_counts)
    if (m < 1 || m > model.n_dof())
      throw std::invalid_argument("freq count " + std::to_string(m) + " out of range");

  const auto start = std::chrono::steady_clock::now();

  struct CellKey {
    std::size_t method_index;
    int m;
    double level;
  };
  std::vector<CellKey> keys;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
    for (int m : config.freq_counts)
      for (double level : config.noise_levels) keys.push_back({mi, m, level});

  std::vector<MonteCarloCell> cells(keys.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t idx; (idx = next.fetch_add(1)) < keys.size();) {
        const CellKey& key = keys[idx];
        cells[idx] = run_cell(model, config, key.method_index, key.m, key.level);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  std::size_t thread_count = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                                : std::thread::hardware_concurrency();
  thread_count = std::max<std::size_t>(1, std::min(thread_count, keys.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < thread_count; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.cells = std::move(cells);
  report.config = config;
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

DamageStudyResult run_damage_study(const TrussModel& model, const DamageScenario& scenario,
                                   int m, const MethodSpec& method, int max_iterations) {
  check_scenario(model, scenario);

  RngStream unused(0);
  const Eigen::VectorXd measured =
      simulate_measurement(model, scenario, m, NoiseSpec{0.0}, unused);

  UpdateConfig config;
  config.method = method.solver;
  config.feature_count = m;
  config.assumed_noise_percent = 0.0;  // errorless study: l1_ineq degrades to equality
  config.p = method.p;
  config.max_iterations = max_iterations;

  DamageStudyResult study;
  study.update = run_update(model, measured, config);
  for (std::size_t k = 0; k < study.update.per_iteration.size(); ++k) {
    const Eigen::VectorXd& damage = study.update.per_iteration[k].damage;
    for (int e = 0; e < damage.size(); ++e)
      study.rows.push_back({static_cast<int>(k) + 1, e, damage[e]});
  }
  return study;
}

}  // namespace sparsid
