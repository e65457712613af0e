#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ssl/noise.hpp"
#include "ssl/spectral.hpp"

namespace ssl {

struct SolverOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;  // relative gradient tolerance
};

struct SolveDiagnostics {
  int iterations = 0;
  double final_grad_norm = 0.0;
  double objective = 0.0;
  double el_residual = 0.0;  // Euler-Lagrange residual of the operator solved
};

// Binary semi-supervised problem: minimize
//   J(u) = 1/2 <u, C^{-1} u> + Phi(u; y)  over u in R^N.
// prior_variance_scale s replaces C by s*C in the quadratic term (the margin
// model of the M = 2 one-hot reduction uses s = 2).
struct ProbitProblem {
  const CovarianceOperator* covariance = nullptr;
  BinaryLabels labels;
  NoiseModel noise;
  double prior_variance_scale = 1.0;

  void validate() const;
};

struct ProbitSolution {
  Eigen::VectorXd u_star;          // length N
  Eigen::VectorXd b_star;          // u_star restricted to Z' (pi ordering)
  Eigen::VectorXd coefficients;    // representer coefficients a_j = F_j(u*_j)
  std::vector<int> predicted_labels;
  SolveDiagnostics diagnostics;
};

// Damped Newton with Armijo backtracking from u = 0 on the full N-dimensional
// functional. Kept as the cross-validation path for the reduced solver.
ProbitSolution solve_full(const ProbitProblem& problem, const SolverOptions& options = {});

// Dimension-reduced Newton on J'(b) = 1/2 <b, (C')^{-1} b> + Phi'(b; y),
// then reconstruction of u*. Linear systems with C' go through its Cholesky
// factor; a numerically singular C' raises IllConditionedError.
ProbitSolution solve_reduced(const ProbitProblem& problem, const SolverOptions& options = {});

// Solves the truncated fixed point u = sum_j F_j(u_j) C_hat e_j on the J
// labelled coordinates, then extends to all N nodes through C_hat columns.
ProbitSolution solve_truncated(const ProbitProblem& problem, int rank,
                               const SolverOptions& options = {});

// u* = sum_{j in Z'} ((C')^{-1} b*)_{pi(j)} c_j, via Cholesky solve and
// column combination. Independent of any prior variance scale (it cancels).
Eigen::VectorXd reconstruct(const Eigen::VectorXd& b_star, const CovarianceOperator& cov,
                            const std::vector<int>& labelled_set);

}  // namespace ssl
