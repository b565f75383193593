#include "sparsid/modal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sparsid {

namespace {

/// Invariants checked on every solve: eigenpair residual and
/// M-orthonormality, both to 1e-8.
void check_solution(const Eigen::MatrixXd& K, const Eigen::VectorXd& M_diag,
                    const ModalData& modal) {
  const Eigen::MatrixXd& phi = modal.mode_shapes;
  const int count = static_cast<int>(modal.eigenvalues.size());

  const Eigen::MatrixXd gram = phi.transpose() * M_diag.asDiagonal() * phi;
  const double ortho_err = (gram - Eigen::MatrixXd::Identity(count, count)).cwiseAbs().maxCoeff();
  if (ortho_err >= 1e-8)
    throw std::runtime_error("eigensolve failed M-orthonormality check (err=" +
                             std::to_string(ortho_err) + ")");

  for (int j = 0; j < count; ++j) {
    const Eigen::VectorXd k_phi = K * phi.col(j);
    const double res =
        (k_phi - modal.eigenvalues[j] * M_diag.asDiagonal() * phi.col(j)).norm() / k_phi.norm();
    if (!(res < 1e-8))
      throw std::runtime_error("eigensolve failed residual check on mode " + std::to_string(j));
  }
}

}  // namespace

ModalData solve_modes(const Eigen::MatrixXd& K, const Eigen::VectorXd& M_diag, int count) {
  const int n = static_cast<int>(K.rows());
  if (K.cols() != n) throw std::invalid_argument("K must be square");
  if (M_diag.size() != n) throw std::invalid_argument("M diagonal size must match K");
  if ((M_diag.array() <= 0).any()) throw std::invalid_argument("mass entries must be positive");
  if (count < 1 || count > n) throw std::invalid_argument("mode count out of range");

  // Reduce K phi = lambda M phi to standard symmetric form with M^{-1/2}.
  const Eigen::VectorXd m_inv_sqrt = M_diag.array().rsqrt();
  Eigen::MatrixXd B = m_inv_sqrt.asDiagonal() * K * m_inv_sqrt.asDiagonal();
  B = 0.5 * (B + B.transpose().eval());  // clean roundoff asymmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("symmetric eigensolver did not converge");

  const Eigen::VectorXd lambda = solver.eigenvalues();  // ascending
  const double lambda_max = lambda[n - 1];
  if (lambda[0] <= 1e-10 * std::max(1.0, lambda_max))
    throw std::runtime_error(
        "model is a mechanism: stiffness matrix is singular on the free DOFs");

  ModalData modal;
  modal.eigenvalues = lambda.head(count);
  modal.frequencies = modal.eigenvalues.array().sqrt() / (2.0 * std::numbers::pi);
  modal.mode_shapes = m_inv_sqrt.asDiagonal() * solver.eigenvectors().leftCols(count);

  // Deterministic sign: the largest-magnitude entry of each shape is
  // positive; ties broken by the lowest index.
  for (int j = 0; j < count; ++j) {
    int arg_max = 0;
    modal.mode_shapes.col(j).cwiseAbs().maxCoeff(&arg_max);
    if (modal.mode_shapes(arg_max, j) < 0) modal.mode_shapes.col(j) *= -1.0;
  }

  check_solution(K, M_diag, modal);
  return modal;
}

ModalData solve_model_modes(const TrussModel& model, const StiffnessParams& params, int count) {
  return solve_modes(model.assemble_stiffness(params), model.assemble_mass(), count);
}

Eigen::VectorXd frequency_changes(const ModalData& modal_a, const ModalData& modal_b) {
  if (modal_a.frequencies.size() != modal_b.frequencies.size())
    throw std::invalid_argument("frequency_changes requires equal mode counts");
  if ((modal_a.frequencies.array() == 0).any())
    throw std::invalid_argument("frequency_changes: zero frequency in reference");
  return (modal_b.frequencies - modal_a.frequencies).cwiseQuotient(modal_a.frequencies);
}

}  // namespace sparsid
