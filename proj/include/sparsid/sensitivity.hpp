#pragma once

#include <Eigen/Dense>

#include "sparsid/modal.hpp"
#include "sparsid/truss.hpp"

namespace sparsid {

/// Linearized relation residual = jacobian * delta_theta at the current
/// parameter point. Features are relative frequency changes normalized by
/// the model frequencies at the linearization point, so both sides are
/// dimensionless and the Jacobian rows are evenly conditioned.
struct SensitivitySystem {
  Eigen::MatrixXd jacobian;   // m x n, row j / column i
  Eigen::VectorXd residual;   // m
  StiffnessParams linearization_point;

  int feature_count() const { return static_cast<int>(jacobian.rows()); }
  int parameter_count() const { return static_cast<int>(jacobian.cols()); }
};

/// Exact derivative of f_j(theta)/f_j(theta_ref) with respect to theta_i at
/// theta_ref = params:  A(j,i) = phi_j^T K_i phi_j / (2 lambda_j), with
/// mass-normalized phi evaluated at the linearization point. All entries are
/// nonnegative. Throws on a repeated eigenvalue (relative gap < 1e-9) among
/// the retained modes, where the derivative is undefined.
Eigen::MatrixXd eigen_jacobian(const TrussModel& model, const StiffnessParams& params, int m);

/// b_j = (f_measured_j - f_current_j) / f_current_j for the m lowest modes.
Eigen::VectorXd feature_residual(const Eigen::VectorXd& f_measured, const ModalData& modal_current,
                                 int m);

/// Builds the full linearized system (Jacobian + residual) at `params`.
SensitivitySystem build_system(const TrussModel& model, const StiffnessParams& params,
                               const Eigen::VectorXd& f_measured, int m);

}  // namespace sparsid
