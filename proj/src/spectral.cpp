#include "ssl/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ssl/errors.hpp"

namespace ssl {

namespace {

// Deterministic orientation: first entry with |v_i| > 1e-12 made positive.
void orient_columns(Eigen::MatrixXd& vectors) {
  for (int k = 0; k < vectors.cols(); ++k) {
    for (int i = 0; i < vectors.rows(); ++i) {
      const double v = vectors(i, k);
      if (std::abs(v) > 1e-12) {
        if (v < 0) vectors.col(k) = -vectors.col(k);
        break;
      }
    }
  }
}

}  // namespace

EigenDecomposition eigendecompose(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() != symmetric.cols())
    throw ContractViolation("eigendecompose requires a square matrix");
  const double scale = symmetric.cwiseAbs().maxCoeff();
  const double asym = (symmetric - symmetric.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, scale))
    throw ContractViolation("eigendecompose requires a symmetric matrix");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");

  EigenDecomposition d;
  d.eigenvalues = solver.eigenvalues();
  // Null-space eigenvalues come back as O(eps * ||L||) roundoff of either
  // sign; snap them to exact zeros so spectral maps of disconnected graphs
  // give lambda = 1 exactly and fractional powers stay real.
  const double floor = 1e-12 * std::max(d.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
  for (int i = 0; i < d.eigenvalues.size(); ++i)
    if (d.eigenvalues(i) < floor) d.eigenvalues(i) = 0.0;
  d.eigenvectors = solver.eigenvectors();
  orient_columns(d.eigenvectors);
  return d;
}

EigenDecomposition eigendecompose(const GraphLaplacian& lap) { return eigendecompose(lap.matrix); }

CovarianceOperator covariance_from(EigenDecomposition decomp, double tau2, double alpha) {
  if (!(tau2 > 0)) throw ContractViolation("covariance requires tau^2 > 0");
  if (!(alpha > 0)) throw ContractViolation("covariance requires alpha > 0");
  CovarianceOperator cov;
  cov.tau2 = tau2;
  cov.alpha = alpha;
  cov.inv_eigenvalues =
      ((decomp.eigenvalues.array() + tau2) / tau2).pow(alpha).matrix();
  cov.decomposition = std::move(decomp);
  return cov;
}

Eigen::VectorXd covariance_column(const CovarianceOperator& cov, int j) {
  if (j < 0 || j >= cov.n()) throw ContractViolation("covariance column index out of range");
  const Eigen::VectorXd coeffs =
      cov.decomposition.eigenvectors.row(j).transpose().cwiseQuotient(cov.inv_eigenvalues);
  return cov.decomposition.eigenvectors * coeffs;
}

Eigen::VectorXd covariance_column(const TruncatedCovariance& cov, int j) {
  if (j < 0 || j >= cov.n()) throw ContractViolation("covariance column index out of range");
  const Eigen::VectorXd coeffs =
      cov.eigenvectors.row(j).transpose().cwiseQuotient(cov.inv_eigenvalues);
  return cov.eigenvectors * coeffs;
}

Eigen::MatrixXd covariance_dense(const CovarianceOperator& cov) {
  return cov.decomposition.eigenvectors *
         cov.inv_eigenvalues.cwiseInverse().asDiagonal() *
         cov.decomposition.eigenvectors.transpose();
}

namespace {

void check_index_list(const std::vector<int>& labelled, int n) {
  if (labelled.empty()) throw ContractViolation("labelled index list is empty");
  std::vector<bool> seen(n, false);
  for (int j : labelled) {
    if (j < 0 || j >= n) throw ContractViolation("labelled index out of range");
    if (seen[j]) throw ContractViolation("duplicate labelled index");
    seen[j] = true;
  }
}

template <typename Cov>
Eigen::MatrixXd submatrix_impl(const Cov& cov, const std::vector<int>& labelled) {
  check_index_list(labelled, cov.n());
  const int j_count = static_cast<int>(labelled.size());
  Eigen::MatrixXd sub(j_count, j_count);
  for (int b = 0; b < j_count; ++b) {
    const Eigen::VectorXd col = covariance_column(cov, labelled[b]);
    for (int a = 0; a < j_count; ++a) sub(a, b) = col(labelled[a]);
  }
  sub = 0.5 * (sub + sub.transpose()).eval();
  return sub;
}

}  // namespace

Eigen::MatrixXd covariance_submatrix(const CovarianceOperator& cov,
                                     const std::vector<int>& labelled) {
  return submatrix_impl(cov, labelled);
}

Eigen::MatrixXd covariance_submatrix(const TruncatedCovariance& cov,
                                     const std::vector<int>& labelled) {
  return submatrix_impl(cov, labelled);
}

TruncatedCovariance truncate(const CovarianceOperator& cov, int rank) {
  if (rank < 1 || rank > cov.n()) throw ContractViolation("truncation rank out of range");
  TruncatedCovariance t;
  t.rank = rank;
  t.inv_eigenvalues = cov.inv_eigenvalues.head(rank);
  t.eigenvectors = cov.decomposition.eigenvectors.leftCols(rank);
  return t;
}

double projection_residual(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (std::size_t a = 0; a < basis.size(); ++a) {
    if (basis[a].size() != v.size()) throw ContractViolation("basis dimension mismatch");
    for (std::size_t b = a; b < basis.size(); ++b) {
      const double dot = basis[a].dot(basis[b]);
      const double target = a == b ? 1.0 : 0.0;
      if (std::abs(dot - target) > 1e-10)
        throw ContractViolation("projection basis is not orthonormal");
    }
  }
  Eigen::VectorXd r = v;
  for (const auto& b : basis) r -= b.dot(v) * b;
  return r.norm();
}

double span_residual(const Eigen::VectorXd& v, const Eigen::MatrixXd& columns) {
  const Eigen::VectorXd coeffs = columns.colPivHouseholderQr().solve(v);
  return (v - columns * coeffs).norm();
}

SpectralReport spectral_report(const CovarianceOperator& cov, int k) {
  if (k < 1 || k >= cov.n()) throw ContractViolation("spectral report requires 1 <= K < N");
  SpectralReport r;
  r.lambda_k = cov.inv_eigenvalues(k - 1);
  r.lambda_k_plus_1 = cov.inv_eigenvalues(k);
  r.gap = r.lambda_k_plus_1 - r.lambda_k;
  r.ratio = r.lambda_k_plus_1 / r.lambda_k;
  r.sigmas = cov.decomposition.eigenvalues;
  return r;
}

}  // namespace ssl
