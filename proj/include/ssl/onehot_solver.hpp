#pragma once

#include <Eigen/Dense>
#include <optional>

#include "ssl/noise.hpp"
#include "ssl/probit_solver.hpp"
#include "ssl/spectral.hpp"

namespace ssl {

struct OneHotOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;
  int full_size_cap = 10000;  // M*N limit for solve_full
};

// Multi-class problem: minimize
//   J(U) = 1/2 <C^{-1}, U^T U>_F + Phi(U; y)  over U in R^{M x N}.
// Setting truncation_rank n < N replaces C by the rank-n truncation, which is
// how the experiments keep the reduced system well conditioned.
struct OneHotProblem {
  const CovarianceOperator* covariance = nullptr;
  MultiLabels labels;
  NoiseModel noise;
  QuadratureRule quadrature;
  std::optional<int> truncation_rank;

  void validate() const;
};

struct OneHotSolution {
  Eigen::MatrixXd u_star;  // M x N
  Eigen::MatrixXd b_star;  // M x J, columns are u* at the labelled nodes
  std::vector<int> predicted_labels;
  SolveDiagnostics diagnostics;
  int psi_floor_hits = 0;  // times log Psi_breve hit the underflow floor
};

// Newton over the M*J unknowns of the reduced functional
//   J'(B) = 1/2 <(C')^{-1}, B^T B>_F - sum_i log Psi_breve(b_i; y_i),
// gradient from onehot_psi_breve_grad, Hessian blocks by differentiating the
// analytic gradient numerically. Reconstructs U* through the covariance
// columns.
OneHotSolution solve_reduced(const OneHotProblem& problem, const OneHotOptions& options = {});

// Full M x N Newton, cross-validation only. Throws SizeError past the cap.
OneHotSolution solve_full(const OneHotProblem& problem, const OneHotOptions& options = {});

// U* = sum_j bb*_j c_j^T with bb* the columns of B* (C')^{-T}.
Eigen::MatrixXd reconstruct_onehot(const Eigen::MatrixXd& b_star, const CovarianceOperator& cov,
                                   const std::vector<int>& labelled_set);

}  // namespace ssl
