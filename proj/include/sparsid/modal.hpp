#pragma once

#include <Eigen/Dense>

#include "sparsid/truss.hpp"

namespace sparsid {

/// Solution of K phi = lambda M phi for the lowest modes.
/// Mode shapes are mass-normalized (phi^T M phi = I) and sign-fixed so the
/// largest-magnitude entry of each shape is positive.
struct ModalData {
  Eigen::VectorXd eigenvalues;   // rad^2/s^2, ascending
  Eigen::VectorXd frequencies;   // Hz, f_j = sqrt(lambda_j) / (2 pi)
  Eigen::MatrixXd mode_shapes;   // n_dof x n_modes
};

/// Generalized symmetric eigensolve with diagonal mass: reduce with M^{-1/2}
/// to a standard symmetric problem and take the lowest `count` pairs.
/// Residual and M-orthonormality invariants are checked on every solve.
/// Throws if K is not positive definite on the free DOFs (mechanism).
ModalData solve_modes(const Eigen::MatrixXd& K, const Eigen::VectorXd& M_diag, int count);

/// Convenience: assemble and solve the model at the given parameters.
ModalData solve_model_modes(const TrussModel& model, const StiffnessParams& params, int count);

/// Elementwise relative change (f_b - f_a) / f_a, modes matched by index.
Eigen::VectorXd frequency_changes(const ModalData& modal_a, const ModalData& modal_b);

}  // namespace sparsid
