#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sparsid/sparse_solvers.hpp"
#include "sparsid/truss.hpp"

namespace sparsid {

/// Configuration of the iterative sensitivity-based updating loop.
///
/// For l1_ineq the residual bound comes from `epsilon` when set, otherwise
/// from the noise rule epsilon = (assumed_noise_percent / 100) * sqrt(m)
/// (each feature's multiplicative frequency error is bounded by no/100, so
/// the uniform bound gives a valid deterministic epsilon). A resolved bound
/// of zero falls back to the equality-constrained solver.
struct UpdateConfig {
  SolverMethod method = SolverMethod::l1_eq;
  int feature_count = 9;
  std::optional<double> epsilon;                 // fixed bound for l1_ineq
  std::optional<double> assumed_noise_percent;   // noise-derived bound
  double p = 0.5;                                // lp_irls exponent
  SignConstraint sign = SignConstraint::none;
  int max_iterations = 20;
  double step_tol = 1e-6;       // stop when ||x||_inf below this
  double residual_tol = 1e-8;   // stop when ||b||_inf below this
  double theta_floor = 0.05;    // clamp keeping K positive definite
  SupportThresholds thresholds;
};

struct IterationRecord {
  Eigen::VectorXd step;             // sparse solve output x = delta theta
  Eigen::VectorXd damage;           // damage estimate 1 - theta after the update
  std::vector<int> support;         // support of `damage`
  double residual_norm_before = 0;  // ||b||_2 at this iteration's linearization point
  double residual_norm_after = 0;   // ||b||_2 after applying the step
};

struct UpdateResult {
  StiffnessParams theta_final;
  Eigen::VectorXd damage_estimates;  // 1 - theta_final
  std::vector<IterationRecord> per_iteration;
  bool converged = false;
  int iterations_used = 0;
  bool support_changed_after_first = false;
};

/// Runs the updating loop: solve modes at theta_k, build the linearized
/// system, solve it for the sparse step x, clamp theta_k + x at theta_floor,
/// repeat until the step or the residual is small or the iteration cap is
/// hit. Non-convergence is a reported outcome with full history, not an
/// error; modal or solver failures propagate with the iteration index
/// attached.
UpdateResult run_update(const TrussModel& model, const Eigen::VectorXd& f_measured,
                        const UpdateConfig& config);

/// Single linearization at the nominal model (the prior-work baseline):
/// run_update with max_iterations = 1.
UpdateResult one_shot(const TrussModel& model, const Eigen::VectorXd& f_measured,
                      const UpdateConfig& config);

}  // namespace sparsid
