#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "sparsid/rng.hpp"
#include "sparsid/sensitivity.hpp"

using namespace sparsid;

namespace {

TrussModel one_dof_bar() {
  return TrussModel({{0, 0.0, 0.0}, {1, 1.0, 0.0}}, {{0, 0, 1, 70e9, 0.01, 2700.0}},
                    {{0, true, true}, {1, false, true}});
}

Eigen::VectorXd random_theta(RngStream& rng, int n, double lo, double hi) {
  Eigen::VectorXd theta(n);
  for (int i = 0; i < n; ++i) theta[i] = lo + (hi - lo) * rng.next_uniform();
  return theta;
}

// Fourth-order central difference of the relative frequency feature
// f_j(theta) / f_j(theta_ref) with respect to theta_i at theta_ref. The
// higher-order stencil keeps the absolute oracle noise near 1e-12, below
// the 1e-5 relative tolerance even on the near-zero Jacobian entries.
double fd_entry(const TrussModel& model, const StiffnessParams& ref, int j, int i, int m,
                double step = 1e-4) {
  auto freq_at = [&](double offset) {
    StiffnessParams shifted = ref;
    shifted.theta[i] += offset;
    return solve_model_modes(model, shifted, m).frequencies[j];
  };
  const double f_ref = solve_model_modes(model, ref, m).frequencies[j];
  const double d = (-freq_at(2 * step) + 8 * freq_at(step) - 8 * freq_at(-step) +
                    freq_at(-2 * step)) /
                   (12.0 * step);
  return d / f_ref;
}

}  // namespace

TEST_CASE("1-DOF bar: d(f/f)/dtheta = 1/(2 theta)") {
  const TrussModel model = one_dof_bar();
  const Eigen::MatrixXd A1 = eigen_jacobian(model, StiffnessParams::nominal(1), 1);
  CHECK(A1(0, 0) == doctest::Approx(0.5).epsilon(1e-12));

  StiffnessParams half{Eigen::VectorXd::Constant(1, 0.5)};
  const Eigen::MatrixXd A2 = eigen_jacobian(model, half, 1);
  CHECK(A2(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("row sums of the nominal Jacobian all equal 1/2") {
  // Euler identity: a uniform delta-theta scales every eigenvalue equally,
  // so sum_i phi^T K_i phi = phi^T K phi = lambda.
  const TrussModel model = canonical_truss();
  const Eigen::MatrixXd A = eigen_jacobian(model, StiffnessParams::nominal(20), 16);
  for (int j = 0; j < 16; ++j)
    CHECK(A.row(j).sum() == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("weighted row-sum identity at random theta") {
  const TrussModel model = canonical_truss();
  RngStream rng(31);
  for (int trial = 0; trial < 4; ++trial) {
    StiffnessParams params{random_theta(rng, 20, 0.6, 1.0)};
    const Eigen::MatrixXd A = eigen_jacobian(model, params, 12);
    for (int j = 0; j < 12; ++j)
      CHECK(std::abs(A.row(j).dot(params.theta) - 0.5) <= 1e-10);
  }
}

TEST_CASE("analytic Jacobian agrees with central finite differences") {
  const TrussModel model = canonical_truss();
  RngStream rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    StiffnessParams params{random_theta(rng, 20, 0.7, 1.0)};
    const int m = 9;
    const Eigen::MatrixXd A = eigen_jacobian(model, params, m);
    const int j = static_cast<int>(rng.next_u64() % m);
    const int i = static_cast<int>(rng.next_u64() % 20);
    const double fd = fd_entry(model, params, j, i, m);
    const double rel = std::abs(fd - A(j, i)) / std::max(std::abs(A(j, i)), 1e-12);
    CHECK(rel < 1e-5);
  }
}

TEST_CASE("all Jacobian entries are nonnegative") {
  const TrussModel model = canonical_truss();
  RngStream rng(33);
  StiffnessParams params{random_theta(rng, 20, 0.5, 1.0)};
  const Eigen::MatrixXd A = eigen_jacobian(model, params, 16);
  CHECK(A.minCoeff() >= -1e-14);
}

TEST_CASE("first-order prediction: the hot term is second order") {
  const TrussModel model = canonical_truss();
  RngStream rng(34);
  const StiffnessParams ref = StiffnessParams::nominal(20);
  const Eigen::MatrixXd A = eigen_jacobian(model, ref, 16);
  const ModalData modal_ref = solve_model_modes(model, ref, 16);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd delta(20);
    for (int i = 0; i < 20; ++i) delta[i] = rng.next_symmetric(1e-4);
    StiffnessParams perturbed{ref.theta + delta};
    const ModalData modal = solve_model_modes(model, perturbed, 16);
    const Eigen::VectorXd actual =
        (modal.frequencies - modal_ref.frequencies).cwiseQuotient(modal_ref.frequencies);
    CHECK((actual - A * delta).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("feature_residual") {
  const TrussModel model = canonical_truss();
  const ModalData modal = solve_model_modes(model, StiffnessParams::nominal(20), 9);

  SUBCASE("measured equals current gives zero") {
    CHECK(feature_residual(modal.frequencies, modal, 9).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("uniform relative shift") {
    const Eigen::VectorXd b = feature_residual(1.01 * modal.frequencies, modal, 9);
    for (int j = 0; j < 9; ++j) CHECK(b[j] == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("length mismatch throws") {
    Eigen::VectorXd three(3);
    three << 1, 2, 3;
    CHECK_THROWS_AS(feature_residual(three, modal, 9), std::invalid_argument);
  }
}

TEST_CASE("degenerate eigenvalue aborts the Jacobian") {
  // Two orthogonal identical bars meeting at one free node: K is a multiple
  // of the identity, so the two eigenvalues coincide exactly.
  TrussModel model({{0, 0.0, 0.0}, {1, -1.0, 0.0}, {2, 0.0, -1.0}},
                   {{0, 1, 0, 70e9, 0.01, 2700.0}, {1, 2, 0, 70e9, 0.01, 2700.0}},
                   {{1, true, true}, {2, true, true}});
  REQUIRE(model.n_dof() == 2);
  CHECK_THROWS_WITH_AS(eigen_jacobian(model, StiffnessParams::nominal(2), 2),
                       doctest::Contains("degenerate"), std::runtime_error);
}

TEST_CASE("build_system bundles Jacobian and residual consistently") {
  const TrussModel model = canonical_truss();
  const ModalData nominal = solve_model_modes(model, StiffnessParams::nominal(20), 9);
  const SensitivitySystem system =
      build_system(model, StiffnessParams::nominal(20), 1.02 * nominal.frequencies, 9);
  CHECK(system.feature_count() == 9);
  CHECK(system.parameter_count() == 20);
  for (int j = 0; j < 9; ++j) CHECK(system.residual[j] == doctest::Approx(0.02));
}
