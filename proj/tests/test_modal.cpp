#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sparsid/modal.hpp"
#include "sparsid/rng.hpp"
#include "sparsid/truss.hpp"

using namespace sparsid;

namespace {

// Independent oracle for the extreme eigenvalues: power iteration on
// M^{-1/2} K M^{-1/2} and on its inverse.
double power_iteration_extreme(const Eigen::MatrixXd& K, const Eigen::VectorXd& M_diag,
                               bool largest) {
  const Eigen::VectorXd mis = M_diag.array().rsqrt();
  const Eigen::MatrixXd B = mis.asDiagonal() * K * mis.asDiagonal();
  const Eigen::MatrixXd op = largest ? B : Eigen::MatrixXd(B.inverse());
  Eigen::VectorXd v = Eigen::VectorXd::Ones(B.rows()).normalized();
  double value = 0;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd w = op * v;
    value = v.dot(w);
    const double n = w.norm();
    if (n == 0) break;
    w /= n;
    if ((w - v).norm() < 1e-14) {
      v = w;
      break;
    }
    v = w;
  }
  value = v.dot(op * v);
  return largest ? value : 1.0 / value;
}

}  // namespace

TEST_CASE("1-DOF system: K = 4 pi^2, M = 1 gives f = 1 Hz") {
  Eigen::MatrixXd K(1, 1);
  K << 4.0 * std::numbers::pi * std::numbers::pi;
  Eigen::VectorXd M(1);
  M << 1.0;
  const ModalData modal = solve_modes(K, M, 1);
  CHECK(modal.eigenvalues[0] == doctest::Approx(4.0 * std::numbers::pi * std::numbers::pi));
  CHECK(modal.frequencies[0] == doctest::Approx(1.0));
}

TEST_CASE("2-DOF chain matches the closed-form eigenvalues") {
  // k = m = 1 chain: characteristic polynomial gives (3 -+ sqrt 5)/2.
  Eigen::MatrixXd K(2, 2);
  K << 2, -1, -1, 1;
  Eigen::VectorXd M = Eigen::VectorXd::Ones(2);
  const ModalData modal = solve_modes(K, M, 2);
  CHECK(modal.eigenvalues[0] == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  CHECK(modal.eigenvalues[1] == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("canonical truss has 16 positive strictly sorted eigenvalues") {
  const TrussModel model = canonical_truss();
  const ModalData modal = solve_model_modes(model, StiffnessParams::nominal(20), 16);
  REQUIRE(modal.eigenvalues.size() == 16);
  CHECK(modal.eigenvalues[0] > 0);
  for (int j = 1; j < 16; ++j) CHECK(modal.eigenvalues[j] > modal.eigenvalues[j - 1]);

  // Cross-check the spectrum edges with the power-iteration oracle.
  const Eigen::MatrixXd K = model.assemble_stiffness(StiffnessParams::nominal(20));
  const Eigen::VectorXd M = model.assemble_mass();
  CHECK(modal.eigenvalues[15] ==
        doctest::Approx(power_iteration_extreme(K, M, true)).epsilon(1e-8));
  CHECK(modal.eigenvalues[0] ==
        doctest::Approx(power_iteration_extreme(K, M, false)).epsilon(1e-8));
}

TEST_CASE("mass orthonormality and residual invariants hold") {
  const TrussModel model = canonical_truss();
  const Eigen::MatrixXd K = model.assemble_stiffness(StiffnessParams::nominal(20));
  const Eigen::VectorXd M = model.assemble_mass();
  const ModalData modal = solve_modes(K, M, 16);
  const Eigen::MatrixXd gram =
      modal.mode_shapes.transpose() * M.asDiagonal() * modal.mode_shapes;
  CHECK((gram - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-8);
  for (int j = 0; j < 16; ++j) {
    const Eigen::VectorXd k_phi = K * modal.mode_shapes.col(j);
    const Eigen::VectorXd m_phi =
        modal.eigenvalues[j] * (M.asDiagonal() * modal.mode_shapes.col(j));
    CHECK((k_phi - m_phi).norm() / k_phi.norm() < 1e-8);
  }
}

TEST_CASE("global scaling law: alpha K scales eigenvalues, keeps shapes") {
  const TrussModel model = canonical_truss();
  const Eigen::MatrixXd K = model.assemble_stiffness(StiffnessParams::nominal(20));
  const Eigen::VectorXd M = model.assemble_mass();
  RngStream rng(21);
  for (int trial = 0; trial < 3; ++trial) {
    const double alpha = 0.2 + 3.0 * rng.next_uniform();
    const ModalData base = solve_modes(K, M, 8);
    const ModalData scaled = solve_modes(alpha * K, M, 8);
    for (int j = 0; j < 8; ++j)
      CHECK(scaled.eigenvalues[j] == doctest::Approx(alpha * base.eigenvalues[j]).epsilon(1e-10));
    CHECK((scaled.mode_shapes - base.mode_shapes).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("reducing one element never increases any eigenvalue") {
  const TrussModel model = canonical_truss();
  const ModalData nominal = solve_model_modes(model, StiffnessParams::nominal(20), 16);
  RngStream rng(22);
  for (int trial = 0; trial < 6; ++trial) {
    const int element = static_cast<int>(rng.next_u64() % 20);
    StiffnessParams damaged = StiffnessParams::nominal(20);
    damaged.theta[element] = 0.3 + 0.6 * rng.next_uniform();
    const ModalData modal = solve_model_modes(model, damaged, 16);
    for (int j = 0; j < 16; ++j)
      CHECK(modal.eigenvalues[j] <= nominal.eigenvalues[j] * (1 + 1e-12));
  }
}

TEST_CASE("frequency_changes") {
  const TrussModel model = canonical_truss();
  const ModalData nominal = solve_model_modes(model, StiffnessParams::nominal(20), 16);

  SUBCASE("identical inputs give zeros") {
    CHECK(frequency_changes(nominal, nominal).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("uniformly halved stiffness shifts every frequency by sqrt(0.5) - 1") {
    const ModalData halved =
        solve_model_modes(model, {Eigen::VectorXd::Constant(20, 0.5)}, 16);
    const Eigen::VectorXd changes = frequency_changes(nominal, halved);
    for (int j = 0; j < 16; ++j)
      CHECK(changes[j] == doctest::Approx(std::sqrt(0.5) - 1.0).epsilon(1e-10));
  }
  SUBCASE("count mismatch throws") {
    const ModalData fewer = solve_model_modes(model, StiffnessParams::nominal(20), 8);
    CHECK_THROWS_AS(frequency_changes(nominal, fewer), std::invalid_argument);
  }
}

TEST_CASE("deterministic output: repeated solves are identical") {
  const TrussModel model = canonical_truss();
  const ModalData a = solve_model_modes(model, StiffnessParams::nominal(20), 16);
  const ModalData b = solve_model_modes(model, StiffnessParams::nominal(20), 16);
  CHECK((a.mode_shapes - b.mode_shapes).cwiseAbs().maxCoeff() == 0.0);
  // Sign convention: the largest-magnitude entry of each shape is positive.
  for (int j = 0; j < 16; ++j) {
    int arg_max = 0;
    a.mode_shapes.col(j).cwiseAbs().maxCoeff(&arg_max);
    CHECK(a.mode_shapes(arg_max, j) > 0);
  }
}

TEST_CASE("mechanism and input validation errors") {
  SUBCASE("singular K reports a mechanism") {
    Eigen::MatrixXd K(2, 2);
    K << 1, 1, 1, 1;  // rank 1
    CHECK_THROWS_WITH_AS(solve_modes(K, Eigen::VectorXd::Ones(2), 2),
                         doctest::Contains("mechanism"), std::runtime_error);
  }
  SUBCASE("count out of range") {
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS(solve_modes(K, Eigen::VectorXd::Ones(3), 4), std::invalid_argument);
    CHECK_THROWS_AS(solve_modes(K, Eigen::VectorXd::Ones(3), 0), std::invalid_argument);
  }
  SUBCASE("nonpositive mass") {
    Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd M(2);
    M << 1.0, 0.0;
    CHECK_THROWS_AS(solve_modes(K, M, 2), std::invalid_argument);
  }
}
