#include "sparsid/updating.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sparsid/modal.hpp"
#include "sparsid/sensitivity.hpp"

namespace sparsid {

namespace {

/// Resolved residual bound for l1_ineq; zero selects the equality solver.
double resolve_epsilon(const UpdateConfig& config) {
  if (config.epsilon) return *config.epsilon;
  if (config.assumed_noise_percent)
    return (*config.assumed_noise_percent / 100.0) *
           std::sqrt(static_cast<double>(config.feature_count));
  throw std::invalid_argument(
      "l1_ineq requires a fixed epsilon or an assumed noise level");
}

SparseSolution solve_step(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const UpdateConfig& config) {
  SparseProblem problem;
  problem.A = A;
  problem.b = b;
  problem.sign = config.sign;
  switch (config.method) {
    case SolverMethod::l0:
      return solve_l0(problem);
    case SolverMethod::l1_eq:
      return solve_l1_eq(problem);
    case SolverMethod::l1_ineq: {
      const double epsilon = resolve_epsilon(config);
      if (epsilon <= 0.0) return solve_l1_eq(problem);
      problem.epsilon = epsilon;
      return solve_l1_ineq(problem);
    }
    case SolverMethod::lp_irls:
      return solve_lp_irls(problem, config.p);
  }
  throw std::invalid_argument("unknown update method");
}

}  // namespace

UpdateResult run_update(const TrussModel& model, const Eigen::VectorXd& f_measured,
                        const UpdateConfig& config) {
  if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(config.theta_floor > 0 && config.theta_floor < 1))
    throw std::invalid_argument("theta_floor must lie in (0, 1)");
  const int m = config.feature_count;
  if (f_measured.size() < m)
    throw std::invalid_argument("measured frequencies shorter than the feature count");

  const int n = model.element_count();
  UpdateResult result;
  result.theta_final = StiffnessParams::nominal(n);
  Eigen::VectorXd& theta = result.theta_final.theta;
  const Eigen::VectorXd theta_nominal = Eigen::VectorXd::Ones(n);

  std::vector<int> first_support;
  ModalData modal = solve_model_modes(model, result.theta_final, m);

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    try {
      const Eigen::VectorXd b = feature_residual(f_measured, modal, m);
      IterationRecord record;
      record.residual_norm_before = b.norm();

      if (b.cwiseAbs().maxCoeff() < config.residual_tol) {
        record.step = Eigen::VectorXd::Zero(n);
        record.damage = theta_nominal - theta;
        record.residual_norm_after = record.residual_norm_before;
        record.support =
            support(record.damage, config.thresholds.tau_rel, config.thresholds.tau_abs);
        result.per_iteration.push_back(std::move(record));
        result.converged = true;
        break;
      }

      // The sparse unknown is the total change x = theta - theta_0 (the
      // quantity that is physically sparse), re-solved at every
      // linearization point: A x = b + A (theta_k - theta_0). Solving for
      // the increment instead would freeze first-iteration linearization
      // error into permanent off-support entries.
      const Eigen::MatrixXd A = eigen_jacobian(model, result.theta_final, m);
      const Eigen::VectorXd rhs = b + A * (theta - theta_nominal);
      const SparseSolution total = solve_step(A, rhs, config);

      const Eigen::VectorXd theta_next =
          (theta_nominal + total.x).cwiseMax(config.theta_floor);
      if (!theta_next.allFinite())
        throw std::runtime_error("parameter update produced a non-finite theta");
      record.step = theta_next - theta;
      theta = theta_next;

      modal = solve_model_modes(model, result.theta_final, m);
      record.damage = theta_nominal - theta;
      record.residual_norm_after = feature_residual(f_measured, modal, m).norm();
      record.support =
          support(record.damage, config.thresholds.tau_rel, config.thresholds.tau_abs);
      const double step_inf = record.step.cwiseAbs().maxCoeff();
      result.per_iteration.push_back(std::move(record));

      if (step_inf < config.step_tol) {
        result.converged = true;
        break;
      }
    } catch (const std::runtime_error& err) {
      throw std::runtime_error("iteration " + std::to_string(iteration) + ": " + err.what());
    }
  }

  result.iterations_used = static_cast<int>(result.per_iteration.size());
  result.damage_estimates = Eigen::VectorXd::Ones(n) - theta;

  for (std::size_t k = 0; k < result.per_iteration.size(); ++k) {
    if (k == 0)
      first_support = result.per_iteration[k].support;
    else if (result.per_iteration[k].support != first_support)
      result.support_changed_after_first = true;
  }
  return result;
}

UpdateResult one_shot(const TrussModel& model, const Eigen::VectorXd& f_measured,
                      const UpdateConfig& config) {
  UpdateConfig single = config;
  single.max_iterations = 1;
  return run_update(model, f_measured, single);
}

}  // namespace sparsid
