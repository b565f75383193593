#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsid/experiments.hpp"
#include "sparsid/io.hpp"
#include "sparsid/modal.hpp"
#include "sparsid/sensitivity.hpp"
#include "sparsid/sparse_solvers.hpp"
#include "sparsid/truss.hpp"
#include "sparsid/updating.hpp"

namespace py = pybind11;
using namespace sparsid;

namespace {

SparseProblem make_problem(Eigen::MatrixXd A, Eigen::VectorXd b, py::object epsilon,
                           const std::string& sign) {
  SparseProblem problem;
  problem.A = std::move(A);
  problem.b = std::move(b);
  if (!epsilon.is_none()) problem.epsilon = epsilon.cast<double>();
  if (sign == "nonpositive")
    problem.sign = SignConstraint::nonpositive;
  else if (sign != "none")
    throw std::invalid_argument("sign must be 'none' or 'nonpositive'");
  return problem;
}

}  // namespace

PYBIND11_MODULE(_sparsid, m) {
  m.doc() = "Sparse stiffness-damage identification for planar trusses";

  py::class_<Node>(m, "Node")
      .def(py::init<int, double, double>(), py::arg("id"), py::arg("x"), py::arg("y"))
      .def_readonly("id", &Node::id)
      .def_readonly("x", &Node::x)
      .def_readonly("y", &Node::y);

  py::class_<BarElement>(m, "BarElement")
      .def_readonly("id", &BarElement::id)
      .def_readonly("node_i", &BarElement::node_i)
      .def_readonly("node_j", &BarElement::node_j)
      .def_readonly("elastic_modulus", &BarElement::elastic_modulus)
      .def_readonly("area", &BarElement::area)
      .def_readonly("density", &BarElement::density);

  py::class_<Support>(m, "Support")
      .def_readonly("node", &Support::node)
      .def_readonly("fix_x", &Support::fix_x)
      .def_readonly("fix_y", &Support::fix_y);

  py::class_<TrussModel>(m, "TrussModel")
      .def_property_readonly("node_count", &TrussModel::node_count)
      .def_property_readonly("element_count", &TrussModel::element_count)
      .def_property_readonly("n_dof", &TrussModel::n_dof)
      .def_property_readonly("nodes", &TrussModel::nodes)
      .def_property_readonly("elements", &TrussModel::elements)
      .def_property_readonly("supports", &TrussModel::supports)
      .def("element_length", &TrussModel::element_length, py::arg("element_id"))
      .def(
          "assemble_stiffness",
          [](const TrussModel& model, const Eigen::VectorXd& theta) {
            return model.assemble_stiffness({theta});
          },
          py::arg("theta"))
      .def("assemble_mass", &TrussModel::assemble_mass)
      .def("__repr__", [](const TrussModel& model) {
        return "<TrussModel nodes=" + std::to_string(model.node_count()) +
               " elements=" + std::to_string(model.element_count()) +
               " n_dof=" + std::to_string(model.n_dof()) + ">";
      });

  m.def("canonical_truss", &canonical_truss, "The built-in 20-bar benchmark truss");
  m.def("load_model", &load_model, py::arg("path"));
  m.def("model_from_json", &model_from_json_text, py::arg("text"));
  m.def("model_to_json", &model_to_json_text, py::arg("model"));

  py::class_<ModalData>(m, "ModalData")
      .def_readonly("eigenvalues", &ModalData::eigenvalues)
      .def_readonly("frequencies", &ModalData::frequencies)
      .def_readonly("mode_shapes", &ModalData::mode_shapes);

  m.def("solve_modes", &solve_modes, py::arg("K"), py::arg("M_diag"), py::arg("count"));
  m.def(
      "model_modes",
      [](const TrussModel& model, const Eigen::VectorXd& theta, int count) {
        return solve_model_modes(model, {theta}, count);
      },
      py::arg("model"), py::arg("theta"), py::arg("count"));
  m.def("frequency_changes", &frequency_changes, py::arg("modal_a"), py::arg("modal_b"));

  m.def(
      "eigen_jacobian",
      [](const TrussModel& model, const Eigen::VectorXd& theta, int m_count) {
        return eigen_jacobian(model, {theta}, m_count);
      },
      py::arg("model"), py::arg("theta"), py::arg("m"));
  m.def("feature_residual", &feature_residual, py::arg("f_measured"), py::arg("modal_current"),
        py::arg("m"));

  py::class_<SparseSolution>(m, "SparseSolution")
      .def_readonly("x", &SparseSolution::x)
      .def_readonly("support", &SparseSolution::support)
      .def_readonly("objective", &SparseSolution::objective)
      .def_readonly("iterations", &SparseSolution::iterations)
      .def_readonly("converged", &SparseSolution::converged)
      .def_readonly("residual_norm", &SparseSolution::residual_norm)
      .def_property_readonly("method",
                             [](const SparseSolution& s) { return method_name(s.method); })
      .def("__repr__", [](const SparseSolution& s) {
        return "<SparseSolution method=" + method_name(s.method) +
               " objective=" + std::to_string(s.objective) + ">";
      });

  m.def(
      "solve_l0",
      [](Eigen::MatrixXd A, Eigen::VectorXd b, double residual_tol) {
        return solve_l0(make_problem(std::move(A), std::move(b), py::none(), "none"),
                        residual_tol);
      },
      py::arg("A"), py::arg("b"), py::arg("residual_tol") = -1.0);
  m.def(
      "solve_l1_eq",
      [](Eigen::MatrixXd A, Eigen::VectorXd b, const std::string& sign) {
        return solve_l1_eq(make_problem(std::move(A), std::move(b), py::none(), sign));
      },
      py::arg("A"), py::arg("b"), py::arg("sign") = "none");
  m.def(
      "solve_l1_ineq",
      [](Eigen::MatrixXd A, Eigen::VectorXd b, double epsilon, const std::string& sign) {
        return solve_l1_ineq(
            make_problem(std::move(A), std::move(b), py::float_(epsilon), sign));
      },
      py::arg("A"), py::arg("b"), py::arg("epsilon"), py::arg("sign") = "none");
  m.def(
      "solve_lp_irls",
      [](Eigen::MatrixXd A, Eigen::VectorXd b, double p) {
        return solve_lp_irls(make_problem(std::move(A), std::move(b), py::none(), "none"), p);
      },
      py::arg("A"), py::arg("b"), py::arg("p") = 0.5);
  m.def("norms", &norms, py::arg("x"), py::arg("p"));
  m.def("support", &support, py::arg("x"), py::arg("tau_rel") = kDefaultSupportRelTol,
        py::arg("tau_abs") = kDefaultSupportAbsTol);

  py::class_<UpdateConfig>(m, "UpdateConfig")
      .def(py::init<>())
      .def_property(
          "method", [](const UpdateConfig& c) { return method_name(c.method); },
          [](UpdateConfig& c, const std::string& name) { c.method = method_from_name(name); })
      .def_readwrite("feature_count", &UpdateConfig::feature_count)
      .def_readwrite("epsilon", &UpdateConfig::epsilon)
      .def_readwrite("assumed_noise_percent", &UpdateConfig::assumed_noise_percent)
      .def_readwrite("p", &UpdateConfig::p)
      .def_readwrite("max_iterations", &UpdateConfig::max_iterations)
      .def_readwrite("step_tol", &UpdateConfig::step_tol)
      .def_readwrite("residual_tol", &UpdateConfig::residual_tol)
      .def_readwrite("theta_floor", &UpdateConfig::theta_floor);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("step", &IterationRecord::step)
      .def_readonly("damage", &IterationRecord::damage)
      .def_readonly("support", &IterationRecord::support)
      .def_readonly("residual_norm_before", &IterationRecord::residual_norm_before)
      .def_readonly("residual_norm_after", &IterationRecord::residual_norm_after);

  py::class_<UpdateResult>(m, "UpdateResult")
      .def_property_readonly("theta",
                             [](const UpdateResult& r) { return r.theta_final.theta; })
      .def_readonly("damage_estimates", &UpdateResult::damage_estimates)
      .def_readonly("per_iteration", &UpdateResult::per_iteration)
      .def_readonly("converged", &UpdateResult::converged)
      .def_readonly("iterations_used", &UpdateResult::iterations_used)
      .def_readonly("support_changed_after_first", &UpdateResult::support_changed_after_first);

  m.def("run_update", &run_update, py::arg("model"), py::arg("f_measured"), py::arg("config"));
  m.def("one_shot", &one_shot, py::arg("model"), py::arg("f_measured"), py::arg("config"));

  py::class_<DamageScenario>(m, "DamageScenario")
      .def(py::init<>())
      .def_readwrite("damaged", &DamageScenario::damaged)
      .def_readwrite("label", &DamageScenario::label);

  py::class_<MethodSpec>(m, "MethodSpec")
      .def(py::init([](const std::string& method, double p) {
             return MethodSpec{method_from_name(method), p};
           }),
           py::arg("method"), py::arg("p") = 0.5)
      .def_property_readonly("display_name", &MethodSpec::display_name);

  py::class_<MonteCarloConfig>(m, "MonteCarloConfig")
      .def(py::init<>())
      .def_readwrite("scenario", &MonteCarloConfig::scenario)
      .def_readwrite("noise_levels", &MonteCarloConfig::noise_levels)
      .def_readwrite("freq_counts", &MonteCarloConfig::freq_counts)
      .def_readwrite("methods", &MonteCarloConfig::methods)
      .def_readwrite("realizations", &MonteCarloConfig::realizations)
      .def_readwrite("seed", &MonteCarloConfig::seed)
      .def_readwrite("full_iteration", &MonteCarloConfig::full_iteration)
      .def_readwrite("max_iterations", &MonteCarloConfig::max_iterations)
      .def_readwrite("threads", &MonteCarloConfig::threads);

  py::class_<MonteCarloCell>(m, "MonteCarloCell")
      .def_readonly("method", &MonteCarloCell::method)
      .def_readonly("m", &MonteCarloCell::freq_count)
      .def_readonly("noise_percent", &MonteCarloCell::noise_percent)
      .def_readonly("successes", &MonteCarloCell::successes)
      .def_readonly("solver_failures", &MonteCarloCell::solver_failures)
      .def_readonly("realizations", &MonteCarloCell::realizations)
      .def_property_readonly("rate", &MonteCarloCell::rate);

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("cells", &ExperimentReport::cells)
      .def_readonly("runtime_seconds", &ExperimentReport::runtime_seconds)
      .def("to_csv", [](const ExperimentReport& r) { return report_to_csv(r); })
      .def("to_json", [](const ExperimentReport& r) { return report_to_json_text(r); });

  m.def("default_sweep_config", &default_sweep_config);
  m.def("canonical_two_bar_scenario", &canonical_two_bar_scenario, py::arg("severity"));
  m.def(
      "simulate_measurement",
      [](const TrussModel& model, const DamageScenario& scenario, int m_count, double level,
         std::uint64_t seed) {
        RngStream stream(seed);
        return simulate_measurement(model, scenario, m_count, NoiseSpec{level}, stream);
      },
      py::arg("model"), py::arg("scenario"), py::arg("m"), py::arg("noise_percent") = 0.0,
      py::arg("seed") = 0);
  m.def(
      "is_success",
      [](const Eigen::VectorXd& x, const DamageScenario& scenario, int m_count) {
        return is_success(x, scenario, m_count);
      },
      py::arg("x"), py::arg("scenario"), py::arg("m"));
  m.def("run_monte_carlo", &run_monte_carlo, py::arg("model"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<DamageStudyRow>(m, "DamageStudyRow")
      .def_readonly("iteration", &DamageStudyRow::iteration)
      .def_readonly("element", &DamageStudyRow::element)
      .def_readonly("damage_estimate", &DamageStudyRow::damage_estimate);

  py::class_<DamageStudyResult>(m, "DamageStudyResult")
      .def_readonly("rows", &DamageStudyResult::rows)
      .def_readonly("update", &DamageStudyResult::update)
      .def("to_csv", [](const DamageStudyResult& s) { return study_to_csv(s); });

  m.def("run_damage_study", &run_damage_study, py::arg("model"), py::arg("scenario"),
        py::arg("m"), py::arg("method"), py::arg("max_iterations") = 20);
}
