#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssl/graph.hpp"

namespace ssl {

// Full symmetric eigendecomposition L = Phi diag(sigma) Phi^T, eigenvalues
// ascending, negative roundoff clamped to zero, and each eigenvector's first
// nonzero entry made positive so regression tests see a deterministic basis.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // sigma_1 <= ... <= sigma_N, all >= 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns phi_k

  int n() const { return static_cast<int>(eigenvalues.size()); }
};

// Spectral representation of C = tau^{2 alpha} (L + tau^2 I)^{-alpha}.
// inv_eigenvalues holds the spectrum of C^{-1}:
//   lambda_k = ((sigma_k + tau^2) / tau^2)^alpha >= 1.
struct CovarianceOperator {
  EigenDecomposition decomposition;
  double tau2 = 1.0;
  double alpha = 1.0;
  Eigen::VectorXd inv_eigenvalues;  // lambda, ascending

  int n() const { return decomposition.n(); }
};

// Rank-n truncation C_hat = sum_{k<=n} lambda_k^{-1} phi_k phi_k^T, keeping
// the largest-variance directions. Stabilizes solves when C^{-1} is
// ill-conditioned at small tau / large alpha.
struct TruncatedCovariance {
  int rank = 0;
  Eigen::VectorXd inv_eigenvalues;  // first n lambdas
  Eigen::MatrixXd eigenvectors;     // first n phi columns

  int n() const { return static_cast<int>(eigenvectors.rows()); }
};

struct SpectralReport {
  double lambda_k = 0.0;
  double lambda_k_plus_1 = 0.0;
  double gap = 0.0;    // lambda_{K+1} - lambda_K
  double ratio = 0.0;  // lambda_{K+1} / lambda_K
  Eigen::VectorXd sigmas;
};

EigenDecomposition eigendecompose(const GraphLaplacian& lap);
// Throws ContractViolation when the matrix is not symmetric.
EigenDecomposition eigendecompose(const Eigen::MatrixXd& symmetric);

// Requires tau2 > 0 and alpha > 0.
CovarianceOperator covariance_from(EigenDecomposition decomp, double tau2, double alpha);

// Column c_j = C e_j = sum_k lambda_k^{-1} (phi_k)_j phi_k; zero-based j.
Eigen::VectorXd covariance_column(const CovarianceOperator& cov, int j);
Eigen::VectorXd covariance_column(const TruncatedCovariance& cov, int j);

// Dense C, for small problems and cross-checks.
Eigen::MatrixXd covariance_dense(const CovarianceOperator& cov);

// Rows and columns of C restricted to the (distinct, zero-based) labelled
// indices, in the order given.
Eigen::MatrixXd covariance_submatrix(const CovarianceOperator& cov,
                                     const std::vector<int>& labelled);
Eigen::MatrixXd covariance_submatrix(const TruncatedCovariance& cov,
                                     const std::vector<int>& labelled);

TruncatedCovariance truncate(const CovarianceOperator& cov, int rank);

// || (I - P) v || where P projects onto the span of an orthonormal basis.
// Throws ContractViolation when the basis is not orthonormal to 1e-10.
double projection_residual(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis);

// Least-squares distance of v to the span of arbitrary (not necessarily
// orthonormal) columns; used for representer-property diagnostics.
double span_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& columns);

// Gap diagnostics around index K (1-based count of expected clusters).
SpectralReport spectral_report(const CovarianceOperator& cov, int k);

}  // namespace ssl
