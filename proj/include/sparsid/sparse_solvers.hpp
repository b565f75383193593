#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace sparsid {

enum class SignConstraint { none, nonpositive };

enum class SolverMethod { l0, l1_eq, l1_ineq, lp_irls };

std::string method_name(SolverMethod method);
SolverMethod method_from_name(const std::string& name);

/// Under-determined linear system A x = b (m < n typical) for which a sparse
/// x is sought. `epsilon` switches the L1 solver to the residual-bounded
/// form ||Ax - b||_2 <= epsilon. The optional nonpositive sign constraint
/// (x <= 0, damage can only reduce stiffness) is honored by the L1 solvers.
struct SparseProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::optional<double> epsilon;
  SignConstraint sign = SignConstraint::none;

  int feature_count() const { return static_cast<int>(A.rows()); }
  int parameter_count() const { return static_cast<int>(A.cols()); }
};

/// Default thresholds separating genuine damage entries (~0.2 in theta-change
/// units on the benchmark) from iteration noise.
inline constexpr double kDefaultSupportRelTol = 0.05;
inline constexpr double kDefaultSupportAbsTol = 1e-4;

struct SupportThresholds {
  double tau_rel = kDefaultSupportRelTol;
  double tau_abs = kDefaultSupportAbsTol;
};

/// { i : |x_i| > max(tau_abs, tau_rel * ||x||_inf) }
std::vector<int> support(const Eigen::VectorXd& x, double tau_rel = kDefaultSupportRelTol,
                         double tau_abs = kDefaultSupportAbsTol);

/// p = 1: sum |x_i|.  p in (0,1): (sum |x_i|^p)^(1/p).  p = 0: exact count
/// of nonzero entries.
double norms(const Eigen::VectorXd& x, double p);

/// One (eps_k, smoothed objective) sample per IRLS iteration; lets tests
/// check within-phase descent of sum (x_i^2 + eps_k)^(p/2).
struct IrlsTracePoint {
  double smoothing;
  double smoothed_objective;
};

struct SparseSolution {
  Eigen::VectorXd x;
  std::vector<int> support;   // by default thresholds
  double objective = 0.0;     // achieved norm value for the solver's norm
  SolverMethod method = SolverMethod::l1_eq;
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0.0; // ||A x - b||_2
  std::vector<IrlsTracePoint> irls_trace;  // lp_irls only
};

/// Minimum-cardinality solve of A x = b by exhaustive support enumeration,
/// k = 0, 1, 2, ... For each candidate support the restricted least-squares
/// solution is tested against `residual_tol`; among minimal-cardinality
/// supports meeting the tolerance the lexicographically smallest wins.
/// Guarded to n <= 25 columns. Pass a negative residual_tol for the default
/// 1e-8 * (1 + ||b||_2).
SparseSolution solve_l0(const SparseProblem& problem, double residual_tol = -1.0);

/// min ||x||_1  s.t.  A x = b, as the split LP over (u, v) >= 0 with
/// x = u - v, solved by a primal-dual interior-point method (basic path
/// following, duality-gap stop 1e-9, iteration cap 200).
SparseSolution solve_l1_eq(const SparseProblem& problem);

/// min ||x||_1  s.t.  ||A x - b||_2 <= epsilon, by a log-barrier method over
/// the second-order-cone feasible set (barrier parameter x10 per outer step,
/// inner Newton tolerance 1e-8), started from the minimum-energy feasible
/// point A^T (A A^T)^{-1} b.
SparseSolution solve_l1_ineq(const SparseProblem& problem);

struct IrlsOptions {
  double smoothing_initial = 1.0;
  double smoothing_floor = 1e-10;
  double step_tol = 1e-8;
  int max_iterations = 100;
};

/// min ||x||_p  s.t.  A x = b for 0 < p < 1 via iteratively reweighted least
/// squares with smoothing continuation: weighted minimum-norm iterates
/// x = W^{-1} A^T (A W^{-1} A^T)^{-1} b, w_i = (x_i^2 + eps_k)^(p/2 - 1),
/// eps_k divided by 10 whenever the step drops below sqrt(eps_k)/100.
/// Returns a feasible stationary point of the smoothed objective; the
/// problem is non-convex, so global optimality is not guaranteed.
SparseSolution solve_lp_irls(const SparseProblem& problem, double p,
                             const IrlsOptions& options = {});

}  // namespace sparsid
