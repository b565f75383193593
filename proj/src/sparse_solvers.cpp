#include "sparsid/sparse_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sparsid {

namespace {

constexpr double kFeasibilityTol = 1e-8;

void check_problem(const SparseProblem& problem) {
  if (problem.A.rows() < 1 || problem.A.cols() < 1)
    throw std::invalid_argument("problem matrix must be nonempty");
  if (problem.b.size() != problem.A.rows())
    throw std::invalid_argument("b length must match the row count of A");
  if (problem.epsilon && *problem.epsilon < 0)
    throw std::invalid_argument("epsilon must be nonnegative");
}

/// rank(A) == rank([A b]) within QR tolerance; the equality-constrained
/// solvers require b in the range of A.
void check_consistent(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const auto rank_A = qr.rank();
  if (rank_A == A.rows()) return;  // full row rank: every b is reachable
  Eigen::MatrixXd Ab(A.rows(), A.cols() + 1);
  Ab << A, b;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_ab(Ab);
  if (qr_ab.rank() > rank_A)
    throw std::invalid_argument("inconsistent system: b is not in the range of A");
}

/// Minimum-energy feasible point A^T (A A^T)^{-1} b (pseudoinverse form, so
/// row-rank-deficient consistent systems work too).
Eigen::VectorXd minimum_energy_solution(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  return cod.solve(b);
}

SparseSolution finalize(const SparseProblem& problem, SolverMethod method, Eigen::VectorXd x,
                        double objective, int iterations, bool converged) {
  SparseSolution solution;
  solution.residual_norm = (problem.A * x - problem.b).norm();
  solution.x = std::move(x);
  solution.support = support(solution.x);
  solution.objective = objective;
  solution.method = method;
  solution.iterations = iterations;
  solution.converged = converged;

  // Feasibility contract of the solved problem.
  if (problem.epsilon) {
    if (solution.residual_norm > *problem.epsilon * (1.0 + kFeasibilityTol) + 1e-12)
      throw std::runtime_error("solver returned an infeasible point: residual " +
                               std::to_string(solution.residual_norm) + " > epsilon");
  } else if (converged &&
             solution.residual_norm > kFeasibilityTol * (1.0 + problem.b.norm())) {
    throw std::runtime_error("solver returned an infeasible point: ||Ax-b|| = " +
                             std::to_string(solution.residual_norm));
  }
  return solution;
}

}  // namespace

std::string method_name(SolverMethod method) {
  switch (method) {
    case SolverMethod::l0: return "l0";
    case SolverMethod::l1_eq: return "l1_eq";
    case SolverMethod::l1_ineq: return "l1_ineq";
    case SolverMethod::lp_irls: return "lp_irls";
  }
  return "unknown";
}

SolverMethod method_from_name(const std::string& name) {
  if (name == "l0") return SolverMethod::l0;
  if (name == "l1_eq") return SolverMethod::l1_eq;
  if (name == "l1_ineq" || name == "l1") return SolverMethod::l1_ineq;
  if (name == "lp_irls" || name == "lp") return SolverMethod::lp_irls;
  throw std::invalid_argument("unknown solver method: " + name);
}

std::vector<int> support(const Eigen::VectorXd& x, double tau_rel, double tau_abs) {
  if (tau_rel < 0 || tau_rel >= 1) throw std::invalid_argument("tau_rel must be in [0, 1)");
  if (tau_abs < 0) throw std::invalid_argument("tau_abs must be nonnegative");
  const double floor = std::max(tau_abs, x.size() ? tau_rel * x.cwiseAbs().maxCoeff() : 0.0);
  std::vector<int> indices;
  for (int i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > floor) indices.push_back(i);
  return indices;
}

double norms(const Eigen::VectorXd& x, double p) {
  if (p == 0.0) {
    int count = 0;
    for (int i = 0; i < x.size(); ++i)
      if (x[i] != 0.0) ++count;
    return count;
  }
  if (p == 1.0) return x.cwiseAbs().sum();
  if (p > 0.0 && p < 1.0) {
    double acc = 0.0;
    for (int i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), p);
    return std::pow(acc, 1.0 / p);
  }
  throw std::invalid_argument("norm exponent must be 0 or in (0, 1]");
}

// ---------------------------------------------------------------------------
// L0 by support enumeration
// ---------------------------------------------------------------------------

SparseSolution solve_l0(const SparseProblem& problem, double residual_tol) {
  check_problem(problem);
  if (problem.sign != SignConstraint::none)
    throw std::invalid_argument("sign constraints are only supported by the L1 solvers");
  const int m = problem.feature_count();
  const int n = problem.parameter_count();
  if (n > 25) throw std::invalid_argument("L0 enumeration is guarded to n <= 25 parameters");

  const double tol = residual_tol >= 0 ? residual_tol : 1e-8 * (1.0 + problem.b.norm());

  if (problem.b.norm() <= tol)
    return finalize(problem, SolverMethod::l0, Eigen::VectorXd::Zero(n), 0.0, 0, true);

  const int k_max = std::min(m, n);
  int tested = 0;
  for (int k = 1; k <= k_max; ++k) {
    // Lexicographic combinations give the smallest qualifying support first.
    std::vector<int> comb(k);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      Eigen::MatrixXd As(m, k);
      for (int c = 0; c < k; ++c) As.col(c) = problem.A.col(comb[c]);
      const Eigen::VectorXd xs = As.colPivHouseholderQr().solve(problem.b);
      ++tested;
      if ((As * xs - problem.b).norm() <= tol) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < k; ++c) x[comb[c]] = xs[c];
        return finalize(problem, SolverMethod::l0, std::move(x), static_cast<double>(k), tested,
                        true);
      }
      int i = k - 1;
      while (i >= 0 && comb[i] == n - k + i) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  throw std::runtime_error("infeasible at tolerance: no support of size <= " +
                           std::to_string(k_max) + " meets the residual bound");
}

// ---------------------------------------------------------------------------
// L1 equality: primal-dual interior point on the split LP
// ---------------------------------------------------------------------------

namespace {

struct LpSolveResult {
  Eigen::VectorXd z;
  int iterations = 0;
  bool converged = false;
};

/// min c^T z  s.t.  G z = d, z >= 0, by basic infeasible path following with
/// fixed centering. G is assumed short and fat with well-scaled entries, the
/// scale this toolkit produces (tens of variables).
LpSolveResult solve_standard_lp(const Eigen::MatrixXd& G, const Eigen::VectorXd& d,
                                const Eigen::VectorXd& c) {
  const int m = static_cast<int>(G.rows());
  const int N = static_cast<int>(G.cols());
  constexpr int kMaxIterations = 200;
  constexpr double kSigma = 0.1;

  // Least-squares starting point shifted into the positive orthant.
  Eigen::LDLT<Eigen::MatrixXd> ggt(G * G.transpose());
  Eigen::VectorXd z = G.transpose() * ggt.solve(d);
  Eigen::VectorXd y = ggt.solve(G * c);
  Eigen::VectorXd s = c - G.transpose() * y;
  const double shift_z = std::max(0.0, -1.5 * z.minCoeff());
  const double shift_s = std::max(0.0, -1.5 * s.minCoeff());
  z.array() += shift_z;
  s.array() += shift_s;
  const double zs = z.dot(s);
  const double pad_z = zs > 0 ? 0.5 * zs / s.sum() : 1.0;
  const double pad_s = zs > 0 ? 0.5 * zs / z.sum() : 1.0;
  z.array() += std::max(pad_z, 1e-2);
  s.array() += std::max(pad_s, 1e-2);

  LpSolveResult result;
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    const Eigen::VectorXd r_p = d - G * z;
    const Eigen::VectorXd r_d = c - G.transpose() * y - s;
    const double gap = z.dot(s);
    const double objective = c.dot(z);
    if (r_p.norm() <= 1e-8 * (1.0 + d.norm()) && r_d.norm() <= 1e-8 * (1.0 + c.norm()) &&
        gap <= 1e-9 * (1.0 + std::abs(objective))) {
      result.z = z;
      result.iterations = iter - 1;
      result.converged = true;
      return result;
    }

    const double tau = kSigma * gap / N;
    const Eigen::ArrayXd dscale = z.array() / s.array();
    const Eigen::MatrixXd normal =
        G * dscale.matrix().asDiagonal() * G.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    Eigen::VectorXd rhs = d - tau * (G * s.cwiseInverse()) +
                          G * (dscale * r_d.array()).matrix();
    Eigen::VectorXd dy = ldlt.solve(rhs);
    if (!dy.allFinite()) {
      // Late-stage conditioning collapse; retry with a jittered diagonal.
      Eigen::MatrixXd reg = normal;
      reg.diagonal().array() += 1e-12 * normal.trace() / m;
      dy = Eigen::LDLT<Eigen::MatrixXd>(reg).solve(rhs);
      if (!dy.allFinite()) break;
    }
    const Eigen::VectorXd ds = r_d - G.transpose() * dy;
    const Eigen::VectorXd dz =
        (tau * s.cwiseInverse() - z - (dscale * ds.array()).matrix()).eval();

    double alpha_p = 1.0, alpha_d = 1.0;
    for (int i = 0; i < N; ++i) {
      if (dz[i] < 0) alpha_p = std::min(alpha_p, -z[i] / dz[i]);
      if (ds[i] < 0) alpha_d = std::min(alpha_d, -s[i] / ds[i]);
    }
    alpha_p = std::min(1.0, 0.995 * alpha_p);
    alpha_d = std::min(1.0, 0.995 * alpha_d);

    z += alpha_p * dz;
    y += alpha_d * dy;
    s += alpha_d * ds;
    result.iterations = iter;
  }
  result.z = z;
  return result;
}

/// Re-fits the interior-point iterate on its detected support: an optimal
/// basis-pursuit solution with support S and injective A_S is exactly
/// A_S^+ b, so the refit removes the O(gap) interior-point fuzz. Kept only
/// when it is feasible, sign-consistent and no worse in the objective.
Eigen::VectorXd polish_l1(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& x, SignConstraint sign) {
  const int n = static_cast<int>(A.cols());
  const double floor = 1e-6 * std::max(x.cwiseAbs().maxCoeff(), 1e-30);
  std::vector<int> candidates;
  for (int i = 0; i < n; ++i)
    if (std::abs(x[i]) > floor) candidates.push_back(i);
  if (candidates.empty() || static_cast<int>(candidates.size()) > A.rows()) return x;

  Eigen::MatrixXd As(A.rows(), candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) As.col(c) = A.col(candidates[c]);
  const Eigen::VectorXd xs = As.colPivHouseholderQr().solve(b);

  Eigen::VectorXd refit = Eigen::VectorXd::Zero(n);
  for (std::size_t c = 0; c < candidates.size(); ++c) refit[candidates[c]] = xs[c];

  const bool feasible = (A * refit - b).norm() <= 1e-10 * (1.0 + b.norm());
  const bool no_worse = refit.cwiseAbs().sum() <= x.cwiseAbs().sum() + 1e-9;
  const bool sign_ok =
      sign != SignConstraint::nonpositive || (refit.array() <= 1e-12).all();
  return (feasible && no_worse && sign_ok) ? refit : x;
}

}  // namespace

SparseSolution solve_l1_eq(const SparseProblem& problem) {
  check_problem(problem);
  if (problem.epsilon)
    throw std::invalid_argument("solve_l1_eq does not take an epsilon bound");
  check_consistent(problem.A, problem.b);

  const int n = problem.parameter_count();
  Eigen::VectorXd x;
  LpSolveResult lp;
  if (problem.sign == SignConstraint::nonpositive) {
    // x = -v, v >= 0: the u part of the split drops out.
    lp = solve_standard_lp(-problem.A, problem.b, Eigen::VectorXd::Ones(n));
    if (!lp.converged)
      throw std::runtime_error(
          "l1 equality solver did not converge (no feasible nonpositive solution?)");
    x = -lp.z;
  } else {
    Eigen::MatrixXd G(problem.A.rows(), 2 * n);
    G << problem.A, -problem.A;
    lp = solve_standard_lp(G, problem.b, Eigen::VectorXd::Ones(2 * n));
    if (!lp.converged) throw std::runtime_error("l1 equality solver did not converge");
    x = lp.z.head(n) - lp.z.tail(n);
  }
  x = polish_l1(problem.A, problem.b, x, problem.sign);
  const double objective = x.cwiseAbs().sum();
  return finalize(problem, SolverMethod::l1_eq, std::move(x), objective, lp.iterations, true);
}

// ---------------------------------------------------------------------------
// L1 inequality: log-barrier over the second-order-cone feasible set
// ---------------------------------------------------------------------------

namespace {

constexpr double kBarrierMu = 10.0;
constexpr double kBarrierTol = 1e-6;
constexpr double kNewtonTol = 1e-8;
constexpr int kNewtonCap = 50;
constexpr double kLineAlpha = 0.01;
constexpr double kLineBeta = 0.5;
constexpr int kLineCap = 32;

/// Largest step keeping ||r + s * Adx|| < epsilon, computed with the stable
/// quadratic-root form (cqe < 0 in the interior).
double cone_step_limit(const Eigen::VectorXd& r, const Eigen::VectorXd& adx, double epsilon) {
  const double aqe = adx.squaredNorm();
  const double bqe = 2.0 * r.dot(adx);
  const double cqe = r.squaredNorm() - epsilon * epsilon;
  if (aqe <= 0) return bqe > 0 ? -cqe / bqe : std::numeric_limits<double>::infinity();
  const double disc = std::sqrt(std::max(bqe * bqe - 4.0 * aqe * cqe, 0.0));
  return -2.0 * cqe / (bqe + disc);
}

struct BarrierState {
  Eigen::VectorXd x;
  int newton_iterations = 0;
  bool line_search_ok = true;
};

/// One Newton stage of the (x, u) barrier problem at fixed tau, following
/// the l1-magic l1qc formulation:
///   min sum(u) - (1/tau) * (sum log(u - x) + sum log(x + u) + log(-fe)),
///   fe = (||Ax-b||^2 - epsilon^2) / 2 < 0.
void barrier_newton(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double epsilon,
                    double tau, Eigen::VectorXd& x, Eigen::VectorXd& u, BarrierState& state) {
  const int n = static_cast<int>(A.cols());
  const Eigen::MatrixXd AtA = A.transpose() * A;

  Eigen::VectorXd r = A * x - b;
  double fe = 0.5 * (r.squaredNorm() - epsilon * epsilon);
  Eigen::ArrayXd fu1 = (x - u).array();   // < 0
  Eigen::ArrayXd fu2 = (-x - u).array();  // < 0
  double f = u.sum() - (1.0 / tau) * ((-fu1).log().sum() + (-fu2).log().sum() + std::log(-fe));

  for (int it = 0; it < kNewtonCap; ++it) {
    const Eigen::VectorXd atr = A.transpose() * r;

    const Eigen::ArrayXd inv1 = fu1.inverse();
    const Eigen::ArrayXd inv2 = fu2.inverse();
    const Eigen::ArrayXd ntgz = inv1 - inv2 + (1.0 / fe) * atr.array();
    const Eigen::ArrayXd ntgu = -tau - inv1 - inv2;
    const Eigen::ArrayXd sig11 = inv1.square() + inv2.square();
    const Eigen::ArrayXd sig12 = -inv1.square() + inv2.square();
    const Eigen::ArrayXd sigx = sig11 - sig12.square() / sig11;

    Eigen::MatrixXd H = (1.0 / (fe * fe)) * (atr * atr.transpose()) - (1.0 / fe) * AtA;
    H.diagonal() += sigx.matrix();
    const Eigen::VectorXd w1 = (ntgz - (sig12 / sig11) * ntgu).matrix();

    Eigen::VectorXd dx = H.ldlt().solve(w1);
    if (!dx.allFinite()) {
      state.line_search_ok = false;
      return;
    }
    const Eigen::VectorXd adx = A * dx;
    const Eigen::ArrayXd du = ntgu / sig11 - (sig12 / sig11) * dx.array();

    // gradf = -(1/tau) [ntgz; ntgu]; the Newton decrement uses it directly.
    const double grad_dot_step =
        -(1.0 / tau) * ((ntgz * dx.array()).sum() + (ntgu * du).sum());
    const double decrement = -grad_dot_step;

    // Largest step staying strictly inside all three barrier domains.
    double smax = std::min(1.0, cone_step_limit(r, adx, epsilon));
    for (int i = 0; i < n; ++i) {
      const double d1 = dx[i] - du[i];
      if (d1 > 0) smax = std::min(smax, -fu1[i] / d1);
      const double d2 = -dx[i] - du[i];
      if (d2 > 0) smax = std::min(smax, -fu2[i] / d2);
    }
    double step = 0.99 * smax;

    Eigen::VectorXd xp, up, rp;
    Eigen::ArrayXd fu1p, fu2p;
    double fep = fe, fp = f;
    bool accepted = false;
    for (int ls = 0; ls < kLineCap; ++ls) {
      xp = x + step * dx;
      up = u + step * du.matrix();
      rp = r + step * adx;
      fu1p = (xp - up).array();
      fu2p = (-xp - up).array();
      fep = 0.5 * (rp.squaredNorm() - epsilon * epsilon);
      if ((fu1p < 0).all() && (fu2p < 0).all() && fep < 0) {
        fp = up.sum() -
             (1.0 / tau) * ((-fu1p).log().sum() + (-fu2p).log().sum() + std::log(-fep));
        if (fp <= f + kLineAlpha * step * grad_dot_step) {
          accepted = true;
          break;
        }
      }
      step *= kLineBeta;
    }
    if (!accepted) {
      state.line_search_ok = false;
      return;
    }

    x = xp;
    u = up;
    r = rp;
    fu1 = fu1p;
    fu2 = fu2p;
    fe = fep;
    f = fp;
    ++state.newton_iterations;

    if (decrement / 2.0 < kNewtonTol) return;
  }
}

/// Newton stages for the sign-constrained form min sum(w) over w > 0 with
/// ||(-A)w - b|| <= epsilon (x = -w).
void barrier_newton_nonneg(const Eigen::MatrixXd& B, const Eigen::VectorXd& b, double epsilon,
                           double tau, Eigen::VectorXd& w, BarrierState& state) {
  const int n = static_cast<int>(B.cols());
  const Eigen::MatrixXd BtB = B.transpose() * B;

  Eigen::VectorXd r = B * w - b;
  double fe = 0.5 * (r.squaredNorm() - epsilon * epsilon);
  double f = w.sum() - (1.0 / tau) * (w.array().log().sum() + std::log(-fe));

  for (int it = 0; it < kNewtonCap; ++it) {
    const Eigen::VectorXd btr = B.transpose() * r;
    const Eigen::VectorXd grad_scaled =
        Eigen::VectorXd::Constant(n, tau) - w.cwiseInverse() - btr / fe;  // tau * grad f

    Eigen::MatrixXd H = (1.0 / (fe * fe)) * (btr * btr.transpose()) - (1.0 / fe) * BtB;
    H.diagonal() += w.array().square().inverse().matrix();

    Eigen::VectorXd dw = H.ldlt().solve(-grad_scaled);
    if (!dw.allFinite()) {
      state.line_search_ok = false;
      return;
    }
    const Eigen::VectorXd bdw = B * dw;
    const double grad_dot_step = grad_scaled.dot(dw) / tau;
    const double decrement = -grad_dot_step;

    double smax = std::min(1.0, cone_step_limit(r, bdw, epsilon));
    for (int i = 0; i < n; ++i)
      if (dw[i] < 0) smax = std::min(smax, -w[i] / dw[i]);
    double step = 0.99 * smax;

    bool accepted = false;
    Eigen::VectorXd wp, rp;
    double fep = fe, fp = f;
    for (int ls = 0; ls < kLineCap; ++ls) {
      wp = w + step * dw;
      rp = r + step * bdw;
      fep = 0.5 * (rp.squaredNorm() - epsilon * epsilon);
      if ((wp.array() > 0).all() && fep < 0) {
        fp = wp.sum() - (1.0 / tau) * (wp.array().log().sum() + std::log(-fep));
        if (fp <= f + kLineAlpha * step * grad_dot_step) {
          accepted = true;
          break;
        }
      }
      step *= kLineBeta;
    }
    if (!accepted) {
      state.line_search_ok = false;
      return;
    }

    w = wp;
    r = rp;
    fe = fep;
    f = fp;
    ++state.newton_iterations;
    if (decrement / 2.0 < kNewtonTol) return;
  }
}

/// Strictly feasible nonnegative start for the sign-constrained barrier:
/// projected-gradient NNLS until the cone constraint has slack, then a push
/// off the boundary of the orthant.
Eigen::VectorXd feasible_nonneg_start(const Eigen::MatrixXd& B, const Eigen::VectorXd& b,
                                      double epsilon) {
  Eigen::VectorXd w = minimum_energy_solution(B, b).cwiseMax(0.0);
  const double lipschitz = (B.transpose() * B).norm();  // Frobenius bounds the spectral norm
  const double target = epsilon * (1.0 - 1e-3);
  for (int it = 0; it < 5000 && (B * w - b).norm() >= target; ++it)
    w = (w - (1.0 / lipschitz) * (B.transpose() * (B * w - b))).cwiseMax(0.0);
  if ((B * w - b).norm() >= target)
    throw std::runtime_error(
        "l1 inequality solver: no strictly feasible nonpositive point within epsilon");

  double push = std::max(1e-6, 0.01 * w.maxCoeff());
  for (int halvings = 0; halvings < 80; ++halvings) {
    const Eigen::VectorXd candidate = w.array() + push;
    if ((B * candidate - b).norm() < epsilon) return candidate;
    push /= 2.0;
  }
  throw std::runtime_error("l1 inequality solver: could not find an interior starting point");
}

}  // namespace

SparseSolution solve_l1_ineq(const SparseProblem& problem) {
  check_problem(problem);
  if (!problem.epsilon || *problem.epsilon <= 0)
    throw std::invalid_argument("solve_l1_ineq requires epsilon > 0");
  const double epsilon = *problem.epsilon;
  const int n = problem.parameter_count();

  if (problem.b.norm() <= epsilon)
    return finalize(problem, SolverMethod::l1_ineq, Eigen::VectorXd::Zero(n), 0.0, 0, true);

  BarrierState state;
  Eigen::VectorXd x;
  int constraint_count = 0;
  double tau = 1.0;
  int outer_stages = 0;

  if (problem.sign == SignConstraint::nonpositive) {
    const Eigen::MatrixXd B = -problem.A;
    Eigen::VectorXd w = feasible_nonneg_start(B, problem.b, epsilon);
    constraint_count = n + 1;
    tau = std::max(static_cast<double>(constraint_count) / w.sum(), 1.0);
    outer_stages = static_cast<int>(std::ceil(
        (std::log(constraint_count) - std::log(kBarrierTol) - std::log(tau)) /
        std::log(kBarrierMu)));
    for (int stage = 0; stage < outer_stages; ++stage) {
      barrier_newton_nonneg(B, problem.b, epsilon, tau, w, state);
      if (!state.line_search_ok && stage + 1 < outer_stages)
        throw std::runtime_error("l1 inequality solver did not converge (line search stalled)");
      tau *= kBarrierMu;
    }
    x = -w;
  } else {
    x = minimum_energy_solution(problem.A, problem.b);
    Eigen::VectorXd u = (0.95 * x.cwiseAbs().array() + 0.10 * x.cwiseAbs().maxCoeff()).matrix();
    constraint_count = 2 * n + 1;
    tau = std::max(static_cast<double>(constraint_count) / x.cwiseAbs().sum(), 1.0);
    outer_stages = static_cast<int>(std::ceil(
        (std::log(constraint_count) - std::log(kBarrierTol) - std::log(tau)) /
        std::log(kBarrierMu)));
    for (int stage = 0; stage < outer_stages; ++stage) {
      barrier_newton(problem.A, problem.b, epsilon, tau, x, u, state);
      if (!state.line_search_ok && stage + 1 < outer_stages)
        throw std::runtime_error("l1 inequality solver did not converge (line search stalled)");
      tau *= kBarrierMu;
    }
  }

  const double objective = x.cwiseAbs().sum();
  return finalize(problem, SolverMethod::l1_ineq, std::move(x), objective,
                  state.newton_iterations, state.line_search_ok);
}

// ---------------------------------------------------------------------------
// Lp (0 < p < 1) via IRLS with smoothing continuation
// ---------------------------------------------------------------------------

SparseSolution solve_lp_irls(const SparseProblem& problem, double p, const IrlsOptions& options) {
  check_problem(problem);
  if (problem.sign != SignConstraint::none)
    throw std::invalid_argument("sign constraints are only supported by the L1 solvers");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("IRLS exponent must lie in (0, 1)");
  check_consistent(problem.A, problem.b);

  const Eigen::MatrixXd& A = problem.A;
  const int m = problem.feature_count();

  Eigen::VectorXd x = minimum_energy_solution(A, problem.b);
  double smoothing = options.smoothing_initial;
  std::vector<IrlsTracePoint> trace;
  bool converged = false;
  int iterations = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::ArrayXd weight_inv =
        (x.array().square() + smoothing).pow(1.0 - p / 2.0);  // 1 / w_i
    const Eigen::MatrixXd AWiAt = A * weight_inv.matrix().asDiagonal() * A.transpose();

    Eigen::LDLT<Eigen::MatrixXd> ldlt(AWiAt);
    Eigen::VectorXd y = ldlt.solve(problem.b);
    if (!y.allFinite() || (AWiAt * y - problem.b).norm() > 1e-10 * (1.0 + problem.b.norm())) {
      Eigen::MatrixXd reg = AWiAt;
      reg.diagonal().array() += 1e-12 * AWiAt.trace() / m;
      y = Eigen::LDLT<Eigen::MatrixXd>(reg).solve(problem.b);
      if (!y.allFinite())
        throw std::runtime_error("IRLS weighted system is numerically singular");
    }
    const Eigen::VectorXd x_next = (weight_inv * (A.transpose() * y).array()).matrix();
    const double step = (x_next - x).cwiseAbs().maxCoeff();
    x = x_next;
    ++iterations;
    trace.push_back({smoothing, (x.array().square() + smoothing).pow(p / 2.0).sum()});

    const bool at_floor = smoothing <= options.smoothing_floor * (1.0 + 1e-12);
    if (step < options.step_tol && at_floor) {
      converged = true;
      break;
    }
    if (step < std::sqrt(smoothing) / 100.0)
      smoothing = std::max(smoothing / 10.0, options.smoothing_floor);
  }

  SparseSolution solution =
      finalize(problem, SolverMethod::lp_irls, std::move(x), 0.0, iterations, converged);
  solution.objective = norms(solution.x, p);
  solution.irls_trace = std::move(trace);
  return solution;
}

}  // namespace sparsid
