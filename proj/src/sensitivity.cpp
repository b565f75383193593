#include "sparsid/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsid {

Eigen::MatrixXd eigen_jacobian(const TrussModel& model, const StiffnessParams& params, int m) {
  const int n = model.element_count();
  if (m < 1 || m > model.n_dof()) throw std::invalid_argument("feature count out of range");

  // Solve the full spectrum so the degeneracy check also sees the first
  // truncated-away neighbor.
  const ModalData modal = solve_model_modes(model, params, model.n_dof());

  const int check_upto = std::min(m, model.n_dof() - 1);
  for (int j = 0; j < check_upto; ++j) {
    const double gap = modal.eigenvalues[j + 1] - modal.eigenvalues[j];
    if (gap <= 1e-9 * std::abs(modal.eigenvalues[j + 1]))
      throw std::runtime_error("derivative undefined at degenerate eigenvalue (modes " +
                               std::to_string(j) + ", " + std::to_string(j + 1) + ")");
  }

  // A(j,i) = phi_j^T K_i phi_j / (2 lambda_j); with the rank-1 bar pattern
  // the quadratic form is (EA/L) * stretch^2.
  Eigen::MatrixXd A(m, n);
  for (int i = 0; i < n; ++i) {
    const BarElement& e = model.elements()[i];
    const double axial = e.elastic_modulus * e.area / model.element_length(i);
    for (int j = 0; j < m; ++j) {
      const double stretch = model.element_stretch(i, modal.mode_shapes.col(j));
      A(j, i) = axial * stretch * stretch / (2.0 * modal.eigenvalues[j]);
    }
  }
  return A;
}

Eigen::VectorXd feature_residual(const Eigen::VectorXd& f_measured, const ModalData& modal_current,
                                 int m) {
  if (f_measured.size() < m)
    throw std::invalid_argument("measured frequency vector shorter than feature count");
  if (modal_current.frequencies.size() < m)
    throw std::invalid_argument("modal data has fewer modes than feature count");

  Eigen::VectorXd b(m);
  for (int j = 0; j < m; ++j)
    b[j] = (f_measured[j] - modal_current.frequencies[j]) / modal_current.frequencies[j];
  return b;
}

SensitivitySystem build_system(const TrussModel& model, const StiffnessParams& params,
                               const Eigen::VectorXd& f_measured, int m) {
  SensitivitySystem system;
  system.jacobian = eigen_jacobian(model, params, m);
  const ModalData modal = solve_model_modes(model, params, m);
  system.residual = feature_residual(f_measured, modal, m);
  system.linearization_point = params;
  return system;
}

}  // namespace sparsid
