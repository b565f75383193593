#include "sparsid/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sparsid {

namespace {

using nlohmann::json;

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("malformed ") + what + " document: " + err.what());
  }
}

std::string format_double(double value, const char* fmt = "%.17g") {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, value);
  return buffer;
}

json sign_to_json(SignConstraint sign) {
  return sign == SignConstraint::nonpositive ? "nonpositive" : "none";
}

SignConstraint sign_from_json(const json& j) {
  const std::string s = j.get<std::string>();
  if (s == "none") return SignConstraint::none;
  if (s == "nonpositive") return SignConstraint::nonpositive;
  throw std::invalid_argument("unknown sign constraint: " + s);
}

json scenario_to_json(const DamageScenario& scenario) {
  json j;
  j["label"] = scenario.label;
  j["damaged"] = json::array();
  for (const auto& [element, severity] : scenario.damaged)
    j["damaged"].push_back({{"element", element + 1}, {"severity", severity}});
  return j;
}

DamageScenario scenario_from_json(const json& j) {
  DamageScenario scenario;
  scenario.label = j.value("label", "");
  if (!j.contains("damaged") || !j["damaged"].is_array())
    throw std::invalid_argument("scenario document requires a 'damaged' array");
  for (const auto& jd : j["damaged"]) {
    const int label = jd.at("element").get<int>();  // 1-based bar label
    if (label < 1) throw std::invalid_argument("scenario element labels are 1-based");
    scenario.damaged.emplace_back(label - 1, jd.at("severity").get<double>());
  }
  return scenario;
}

json sweep_to_json(const MonteCarloConfig& config) {
  json j;
  j["scenario"] = scenario_to_json(config.scenario);
  j["noise_levels"] = config.noise_levels;
  j["freq_counts"] = config.freq_counts;
  j["methods"] = json::array();
  for (const MethodSpec& spec : config.methods) {
    json jm{{"method", method_name(spec.solver)}};
    if (spec.solver == SolverMethod::lp_irls) jm["p"] = spec.p;
    j["methods"].push_back(jm);
  }
  j["realizations"] = config.realizations;
  j["seed"] = config.seed;
  j["support"] = {{"tau_rel", config.thresholds.tau_rel}, {"tau_abs", config.thresholds.tau_abs}};
  j["full_iteration"] = config.full_iteration;
  j["max_iterations"] = config.max_iterations;
  // `threads` is an execution knob with no effect on results; it is never
  // serialized, so reports stay identical across worker counts.
  return j;
}

MonteCarloConfig sweep_from_json(const json& j) {
  MonteCarloConfig config = default_sweep_config();
  if (j.contains("scenario")) config.scenario = scenario_from_json(j["scenario"]);
  if (j.contains("noise_levels")) config.noise_levels = j["noise_levels"].get<std::vector<double>>();
  if (j.contains("freq_counts")) config.freq_counts = j["freq_counts"].get<std::vector<int>>();
  if (j.contains("methods")) {
    config.methods.clear();
    for (const auto& jm : j["methods"]) {
      MethodSpec spec;
      spec.solver = method_from_name(jm.at("method").get<std::string>());
      spec.p = jm.value("p", 0.5);
      config.methods.push_back(spec);
    }
  }
  config.realizations = j.value("realizations", config.realizations);
  config.seed = j.value("seed", config.seed);
  if (j.contains("support")) {
    config.thresholds.tau_rel = j["support"].value("tau_rel", config.thresholds.tau_rel);
    config.thresholds.tau_abs = j["support"].value("tau_abs", config.thresholds.tau_abs);
  }
  config.full_iteration = j.value("full_iteration", config.full_iteration);
  config.max_iterations = j.value("max_iterations", config.max_iterations);
  return config;
}

}  // namespace

SparseProblem problem_from_json_text(const std::string& text) {
  const json j = parse(text, "problem");
  SparseProblem problem;
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  if (m < 1 || n < 1) throw std::invalid_argument("problem dimensions must be positive");
  const auto a_values = j.at("A").get<std::vector<double>>();
  const auto b_values = j.at("b").get<std::vector<double>>();
  if (static_cast<int>(a_values.size()) != m * n)
    throw std::invalid_argument("problem document: A must hold m*n row-major values");
  if (static_cast<int>(b_values.size()) != m)
    throw std::invalid_argument("problem document: b must hold m values");
  problem.A.resize(m, n);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < n; ++c) problem.A(r, c) = a_values[r * n + c];
  problem.b = Eigen::Map<const Eigen::VectorXd>(b_values.data(), m);
  if (j.contains("epsilon") && !j["epsilon"].is_null())
    problem.epsilon = j["epsilon"].get<double>();
  if (j.contains("sign_constraint")) problem.sign = sign_from_json(j["sign_constraint"]);
  return problem;
}

SparseProblem load_problem(const std::string& path) {
  return problem_from_json_text(read_text_file(path));
}

std::string problem_to_json_text(const SparseProblem& problem) {
  json j;
  j["m"] = problem.feature_count();
  j["n"] = problem.parameter_count();
  std::vector<double> a_values;
  a_values.reserve(problem.A.size());
  for (int r = 0; r < problem.A.rows(); ++r)
    for (int c = 0; c < problem.A.cols(); ++c) a_values.push_back(problem.A(r, c));
  j["A"] = a_values;
  j["b"] = std::vector<double>(problem.b.data(), problem.b.data() + problem.b.size());
  if (problem.epsilon) j["epsilon"] = *problem.epsilon;
  j["sign_constraint"] = sign_to_json(problem.sign);
  return j.dump(2) + "\n";
}

std::string solution_to_json_text(const SparseSolution& solution) {
  json j;
  j["method"] = method_name(solution.method);
  j["x"] = std::vector<double>(solution.x.data(), solution.x.data() + solution.x.size());
  j["support"] = solution.support;
  j["objective"] = solution.objective;
  j["iterations"] = solution.iterations;
  j["converged"] = solution.converged;
  j["residual_norm"] = solution.residual_norm;
  return j.dump(2) + "\n";
}

std::string solution_to_csv(const SparseSolution& solution) {
  std::ostringstream out;
  out << "index,x\n";
  for (int i = 0; i < solution.x.size(); ++i)
    out << i << "," << format_double(solution.x[i]) << "\n";
  return out.str();
}

DamageScenario scenario_from_json_text(const std::string& text) {
  return scenario_from_json(parse(text, "scenario"));
}

DamageScenario load_scenario(const std::string& path) {
  return scenario_from_json_text(read_text_file(path));
}

std::string scenario_to_json_text(const DamageScenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

MonteCarloConfig sweep_config_from_json_text(const std::string& text) {
  return sweep_from_json(parse(text, "sweep config"));
}

MonteCarloConfig load_sweep_config(const std::string& path) {
  return sweep_config_from_json_text(read_text_file(path));
}

std::string sweep_config_to_json_text(const MonteCarloConfig& config) {
  return sweep_to_json(config).dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,m,noise_pct,successes,realizations,rate\n";
  for (const MonteCarloCell& cell : report.cells) {
    out << cell.method << "," << cell.freq_count << "," << format_double(cell.noise_percent, "%g")
        << "," << cell.successes << "," << cell.realizations << ","
        << format_double(cell.rate(), "%.6f") << "\n";
  }
  return out.str();
}

std::string report_to_json_text(const ExperimentReport& report) {
  json j;
  j["generator"] = "splitmix64";
  j["seed"] = report.config.seed;
  j["config"] = sweep_to_json(report.config);
  j["cells"] = json::array();
  for (const MonteCarloCell& cell : report.cells) {
    j["cells"].push_back({{"method", cell.method},
                          {"m", cell.freq_count},
                          {"noise_pct", cell.noise_percent},
                          {"successes", cell.successes},
                          {"solver_failures", cell.solver_failures},
                          {"realizations", cell.realizations},
                          {"rate", cell.rate()}});
  }
  return j.dump(2) + "\n";
}

std::string study_to_csv(const DamageStudyResult& study) {
  std::ostringstream out;
  out << "iteration,element,damage_estimate\n";
  for (const DamageStudyRow& row : study.rows)
    out << row.iteration << "," << row.element + 1 << "," << format_double(row.damage_estimate)
        << "\n";
  return out.str();
}

std::string study_to_json_text(const DamageStudyResult& study) {
  return update_result_to_json_text(study.update);
}

std::string update_result_to_csv(const UpdateResult& result) {
  std::ostringstream out;
  out << "iteration,element,damage_estimate\n";
  for (std::size_t k = 0; k < result.per_iteration.size(); ++k) {
    const Eigen::VectorXd& damage = result.per_iteration[k].damage;
    for (int e = 0; e < damage.size(); ++e)
      out << k + 1 << "," << e + 1 << "," << format_double(damage[e]) << "\n";
  }
  return out.str();
}

std::string update_result_to_json_text(const UpdateResult& result) {
  json j;
  j["converged"] = result.converged;
  j["iterations_used"] = result.iterations_used;
  j["support_changed_after_first"] = result.support_changed_after_first;
  j["theta"] = std::vector<double>(result.theta_final.theta.data(),
                                   result.theta_final.theta.data() +
                                       result.theta_final.theta.size());
  j["damage"] = std::vector<double>(result.damage_estimates.data(),
                                    result.damage_estimates.data() +
                                        result.damage_estimates.size());
  j["per_iteration"] = json::array();
  for (std::size_t k = 0; k < result.per_iteration.size(); ++k) {
    const IterationRecord& rec = result.per_iteration[k];
    json jr;
    jr["iteration"] = k + 1;
    jr["step"] = std::vector<double>(rec.step.data(), rec.step.data() + rec.step.size());
    jr["damage"] = std::vector<double>(rec.damage.data(), rec.damage.data() + rec.damage.size());
    json support_labels = json::array();
    for (int e : rec.support) support_labels.push_back(e + 1);  // 1-based bar labels
    jr["support"] = support_labels;
    jr["residual_norm_before"] = rec.residual_norm_before;
    jr["residual_norm_after"] = rec.residual_norm_after;
    j["per_iteration"].push_back(jr);
  }
  return j.dump(2) + "\n";
}

Eigen::VectorXd load_frequencies(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open frequency file: " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double v;
    if (ls >> v) values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("frequency file is empty: " + path);
  for (std::size_t k = 1; k < values.size(); ++k)
    if (values[k] < values[k - 1])
      throw std::invalid_argument("frequency file must be ascending: " + path);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

std::string frequencies_to_text(const Eigen::VectorXd& frequencies) {
  std::ostringstream out;
  for (int j = 0; j < frequencies.size(); ++j) out << format_double(frequencies[j]) << "\n";
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing file: " + path);
}

}  // namespace sparsid
