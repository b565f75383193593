// sparsid command-line front end: model inspection, modal analysis,
// standalone sparse solves, damage identification and Monte Carlo sweeps.
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sparsid/experiments.hpp"
#include "sparsid/io.hpp"
#include "sparsid/modal.hpp"
#include "sparsid/sensitivity.hpp"
#include "sparsid/sparse_solvers.hpp"
#include "sparsid/truss.hpp"
#include "sparsid/updating.hpp"

namespace {

using namespace sparsid;

struct GlobalOptions {
  std::string output;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
};

void emit(const GlobalOptions& opts, const std::string& content) {
  if (opts.output.empty())
    std::cout << content;
  else
    write_text_file(opts.output, content);
}

void note(const GlobalOptions& opts, const std::string& line) {
  if (!opts.quiet) std::cerr << line << "\n";
}

TrussModel resolve_model(const std::string& name) {
  if (name == "canonical") return canonical_truss();
  return load_model(name);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

int run(int argc, char** argv) {
  CLI::App app{"sparsid: sparse stiffness-damage identification for planar trusses"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--output", opts.output, "Write the result to this file instead of stdout");
  app.add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", opts.seed, "Random seed for stochastic commands")
      ->each([&](const std::string&) { opts.seed_given = true; });
  app.add_flag("--quiet", opts.quiet, "Suppress console diagnostics");

  // model: validate and summarize a model document
  auto* cmd_model = app.add_subcommand("model", "Validate and summarize a truss model");
  std::string model_name = "canonical";
  cmd_model->add_option("--model", model_name, "Model file or 'canonical'");

  // modal: natural frequencies
  auto* cmd_modal = app.add_subcommand("modal", "Solve natural frequencies");
  std::string modal_model = "canonical";
  int modal_count = 0;
  std::vector<double> modal_theta;
  cmd_modal->add_option("--model", modal_model, "Model file or 'canonical'");
  cmd_modal->add_option("--count", modal_count, "Number of modes (default: all)");
  cmd_modal->add_option("--theta", modal_theta,
                        "Per-element stiffness multipliers (default: nominal)");

  // solve: standalone sparse problem
  auto* cmd_solve = app.add_subcommand("solve", "Solve a sparse problem document");
  std::string solve_problem;
  std::string solve_method = "l1_eq";
  double solve_p = 0.5;
  std::optional<double> solve_epsilon;
  cmd_solve->add_option("--problem", solve_problem, "Problem JSON file")->required();
  cmd_solve->add_option("--method", solve_method, "Solver")
      ->check(CLI::IsMember({"l0", "l1_eq", "l1_ineq", "lp_irls"}));
  cmd_solve->add_option("--p", solve_p, "Lp exponent for lp_irls");
  cmd_solve->add_option("--epsilon", solve_epsilon,
                        "Residual bound, overrides the document value");

  // identify: model + measured frequencies -> damage
  auto* cmd_identify = app.add_subcommand("identify", "Identify damage from measurements");
  std::string id_model = "canonical";
  std::string id_measured;
  std::string id_method = "l1_eq";
  int id_m = 9;
  double id_p = 0.5;
  std::optional<double> id_epsilon;
  std::optional<double> id_noise;
  int id_max_iterations = 20;
  bool id_one_shot = false;
  bool id_nonpositive = false;
  std::string id_dump_system;
  cmd_identify->add_option("--model", id_model, "Model file or 'canonical'");
  cmd_identify->add_option("--measured", id_measured, "Measured frequency file (Hz, ascending)")
      ->required();
  cmd_identify->add_option("--method", id_method, "Solver")
      ->check(CLI::IsMember({"l0", "l1_eq", "l1_ineq", "lp_irls"}));
  cmd_identify->add_option("--m", id_m, "Number of frequencies used");
  cmd_identify->add_option("--p", id_p, "Lp exponent for lp_irls");
  cmd_identify->add_option("--epsilon", id_epsilon, "Fixed residual bound for l1_ineq");
  cmd_identify->add_option("--assumed-noise", id_noise,
                           "Assumed noise percent; sets epsilon = (no/100)*sqrt(m)");
  cmd_identify->add_option("--max-iterations", id_max_iterations, "Updating iteration cap");
  cmd_identify->add_flag("--one-shot", id_one_shot, "Single linearization at the nominal model");
  cmd_identify->add_flag("--nonpositive", id_nonpositive,
                         "Constrain theta changes to be nonpositive (L1 solvers)");
  cmd_identify->add_option("--dump-system", id_dump_system,
                           "Also write the first linearized system as a problem document");

  // mc: Monte Carlo sweep
  auto* cmd_mc = app.add_subcommand("mc", "Run a Monte Carlo success-rate sweep");
  std::string mc_config;
  std::string mc_model = "canonical";
  int mc_threads = 0;
  cmd_mc->add_option("--config", mc_config, "Sweep config JSON (default: built-in sweep)");
  cmd_mc->add_option("--model", mc_model, "Model file or 'canonical'");
  cmd_mc->add_option("--threads", mc_threads, "Worker threads (0 = hardware)");

  // study: noiseless per-iteration damage tables
  auto* cmd_study = app.add_subcommand("study", "Noiseless per-iteration damage study");
  std::string study_model = "canonical";
  std::string study_scenario;
  double study_severity = 0.20;
  std::string study_method = "l1_eq";
  double study_p = 0.5;
  int study_m = 9;
  int study_max_iterations = 20;
  cmd_study->add_option("--model", study_model, "Model file or 'canonical'");
  cmd_study->add_option("--scenario", study_scenario,
                        "Scenario JSON (default: two-bar benchmark)");
  cmd_study->add_option("--severity", study_severity,
                        "Severity of the default two-bar scenario");
  cmd_study->add_option("--method", study_method, "Solver")
      ->check(CLI::IsMember({"l0", "l1_eq", "l1_ineq", "lp_irls"}));
  cmd_study->add_option("--p", study_p, "Lp exponent for lp_irls");
  cmd_study->add_option("--m", study_m, "Number of frequencies used");
  cmd_study->add_option("--max-iterations", study_max_iterations, "Updating iteration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }

  if (cmd_model->parsed()) {
    const TrussModel model = resolve_model(model_name);
    if (opts.format == "json") {
      std::ostringstream out;
      out << "{\n  \"nodes\": " << model.node_count()
          << ",\n  \"elements\": " << model.element_count()
          << ",\n  \"supports\": " << model.supports().size()
          << ",\n  \"n_dof\": " << model.n_dof()
          << ",\n  \"constrained_dofs\": " << model.constrained_dof_count() << "\n}\n";
      emit(opts, out.str());
    } else {
      std::ostringstream out;
      out << "field,value\n"
          << "nodes," << model.node_count() << "\n"
          << "elements," << model.element_count() << "\n"
          << "supports," << model.supports().size() << "\n"
          << "n_dof," << model.n_dof() << "\n"
          << "constrained_dofs," << model.constrained_dof_count() << "\n";
      emit(opts, out.str());
    }
    note(opts, "model OK");
    return 0;
  }

  if (cmd_modal->parsed()) {
    const TrussModel model = resolve_model(modal_model);
    StiffnessParams params = StiffnessParams::nominal(model.element_count());
    if (!modal_theta.empty()) {
      if (static_cast<int>(modal_theta.size()) != model.element_count())
        throw std::invalid_argument("--theta length must equal the element count");
      params.theta = Eigen::Map<const Eigen::VectorXd>(modal_theta.data(), modal_theta.size());
    }
    const int count = modal_count > 0 ? modal_count : model.n_dof();
    const ModalData modal = solve_model_modes(model, params, count);
    if (opts.format == "json") {
      std::ostringstream out;
      out << "{\n  \"frequencies_hz\": [";
      for (int j = 0; j < modal.frequencies.size(); ++j)
        out << (j ? ", " : "") << format_double(modal.frequencies[j]);
      out << "]\n}\n";
      emit(opts, out.str());
    } else {
      std::ostringstream out;
      out << "mode,frequency_hz\n";
      for (int j = 0; j < modal.frequencies.size(); ++j)
        out << j + 1 << "," << format_double(modal.frequencies[j]) << "\n";
      emit(opts, out.str());
    }
    return 0;
  }

  if (cmd_solve->parsed()) {
    SparseProblem problem = load_problem(solve_problem);
    if (solve_epsilon) problem.epsilon = *solve_epsilon;
    const SolverMethod method = method_from_name(solve_method);
    SparseSolution solution;
    switch (method) {
      case SolverMethod::l0: solution = solve_l0(problem); break;
      case SolverMethod::l1_eq:
        problem.epsilon.reset();
        solution = solve_l1_eq(problem);
        break;
      case SolverMethod::l1_ineq: solution = solve_l1_ineq(problem); break;
      case SolverMethod::lp_irls:
        problem.epsilon.reset();
        solution = solve_lp_irls(problem, solve_p);
        break;
    }
    emit(opts, opts.format == "json" ? solution_to_json_text(solution)
                                     : solution_to_csv(solution));
    std::ostringstream summary;
    summary << "objective " << solution.objective << ", residual " << solution.residual_norm
            << ", iterations " << solution.iterations << ", converged "
            << (solution.converged ? "yes" : "no");
    note(opts, summary.str());
    return 0;
  }

  if (cmd_identify->parsed()) {
    const TrussModel model = resolve_model(id_model);
    const Eigen::VectorXd measured = load_frequencies(id_measured);

    UpdateConfig config;
    config.method = method_from_name(id_method);
    config.feature_count = id_m;
    config.epsilon = id_epsilon;
    config.assumed_noise_percent = id_noise;
    config.p = id_p;
    config.sign = id_nonpositive ? SignConstraint::nonpositive : SignConstraint::none;
    config.max_iterations = id_max_iterations;

    if (!id_dump_system.empty()) {
      const SensitivitySystem system =
          build_system(model, StiffnessParams::nominal(model.element_count()), measured, id_m);
      SparseProblem problem;
      problem.A = system.jacobian;
      problem.b = system.residual;
      if (config.method == SolverMethod::l1_ineq && (id_epsilon || id_noise)) {
        problem.epsilon = id_epsilon ? *id_epsilon
                                     : (*id_noise / 100.0) * std::sqrt(static_cast<double>(id_m));
      }
      write_text_file(id_dump_system, problem_to_json_text(problem));
      note(opts, "linearized system written to " + id_dump_system);
    }

    const UpdateResult result = id_one_shot ? one_shot(model, measured, config)
                                            : run_update(model, measured, config);
    emit(opts, opts.format == "json" ? update_result_to_json_text(result)
                                     : update_result_to_csv(result));
    std::ostringstream summary;
    summary << (result.converged ? "converged" : "not converged") << " after "
            << result.iterations_used << " iteration(s); support {";
    const auto final_support = result.per_iteration.empty()
                                   ? std::vector<int>{}
                                   : result.per_iteration.back().support;
    for (std::size_t k = 0; k < final_support.size(); ++k)
      summary << (k ? ", " : "") << final_support[k] + 1;
    summary << "} (1-based bars)";
    note(opts, summary.str());
    return 0;
  }

  if (cmd_mc->parsed()) {
    const TrussModel model = resolve_model(mc_model);
    MonteCarloConfig config =
        mc_config.empty() ? default_sweep_config() : load_sweep_config(mc_config);
    if (opts.seed_given) config.seed = opts.seed;
    config.threads = mc_threads;
    const ExperimentReport report = run_monte_carlo(model, config);
    emit(opts, opts.format == "json" ? report_to_json_text(report) : report_to_csv(report));
    std::ostringstream summary;
    summary << report.cells.size() << " cells x " << config.realizations << " realizations in "
            << report.runtime_seconds << " s";
    note(opts, summary.str());
    return 0;
  }

  if (cmd_study->parsed()) {
    const TrussModel model = resolve_model(study_model);
    const DamageScenario scenario = study_scenario.empty()
                                        ? canonical_two_bar_scenario(study_severity)
                                        : load_scenario(study_scenario);
    MethodSpec spec{method_from_name(study_method), study_p};
    const DamageStudyResult study =
        run_damage_study(model, scenario, study_m, spec, study_max_iterations);
    emit(opts, opts.format == "json" ? study_to_json_text(study) : study_to_csv(study));
    std::ostringstream summary;
    summary << scenario.label << ": "
            << (study.update.converged ? "converged" : "not converged") << " after "
            << study.update.iterations_used << " iteration(s)";
    note(opts, summary.str());
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
