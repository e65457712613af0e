#include "ssl/probit_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "ssl/errors.hpp"

namespace ssl {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kMaxBacktracks = 60;

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Cholesky of the labelled submatrix with a crude conditioning estimate; the
// reduced path must not proceed on a numerically singular C'.
Eigen::LLT<Eigen::MatrixXd> chol_or_throw(const Eigen::MatrixXd& sub) {
  Eigen::LLT<Eigen::MatrixXd> llt(sub);
  bool bad = llt.info() != Eigen::Success;
  if (!bad) {
    const Eigen::VectorXd diag = llt.matrixLLT().diagonal();
    const double dmin = diag.minCoeff();
    const double dmax = diag.maxCoeff();
    bad = !(dmin > 0) || (dmin / dmax) * (dmin / dmax) < 1e-14;
  }
  if (bad)
    throw IllConditionedError(
        "labelled covariance submatrix is numerically singular; "
        "use the truncated covariance path (solve_truncated)");
  return llt;
}

struct LabelData {
  std::vector<int> set;
  std::vector<int> y;
};

LabelData label_data(const BinaryLabels& labels) { return {labels.labelled_set, labels.values}; }

}  // namespace

void ProbitProblem::validate() const {
  if (covariance == nullptr) throw ContractViolation("probit problem needs a covariance");
  noise.validate();
  labels.validate(covariance->n());
  if (!(prior_variance_scale > 0))
    throw ContractViolation("prior variance scale must be positive");
}

ProbitSolution solve_full(const ProbitProblem& problem, const SolverOptions& options) {
  problem.validate();
  const CovarianceOperator& cov = *problem.covariance;
  const int n = cov.n();
  const LabelData lab = label_data(problem.labels);
  const int j_count = static_cast<int>(lab.set.size());

  // Precision matrix of the (optionally scaled) prior.
  const Eigen::VectorXd lambda = cov.inv_eigenvalues / problem.prior_variance_scale;
  const Eigen::MatrixXd& phi = cov.decomposition.eigenvectors;
  const Eigen::MatrixXd precision = phi * lambda.asDiagonal() * phi.transpose();

  const auto objective = [&](const Eigen::VectorXd& u) {
    double val = 0.5 * u.dot(precision * u);
    for (int i = 0; i < j_count; ++i) val += neg_log_cdf(problem.noise, u(lab.set[i]) * lab.y[i]);
    return val;
  };
  const auto gradient = [&](const Eigen::VectorXd& u) {
    Eigen::VectorXd g = precision * u;
    for (int i = 0; i < j_count; ++i)
      g(lab.set[i]) -= probit_F(problem.noise, u(lab.set[i]), lab.y[i]);
    return g;
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = gradient(u);
  const double g0 = g.norm();
  const double tol = options.tolerance * std::max(1.0, g0);

  int iter = 0;
  double fval = objective(u);
  while (g.norm() > tol) {
    if (iter >= options.max_iterations)
      throw ConvergenceError("probit full Newton did not converge", iter, g.norm(), to_std(u));
    Eigen::MatrixXd hess = precision;
    for (int i = 0; i < j_count; ++i)
      hess(lab.set[i], lab.set[i]) += neg_log_cdf_dd(problem.noise, u(lab.set[i]) * lab.y[i]);
    const Eigen::VectorXd step = Eigen::LLT<Eigen::MatrixXd>(hess).solve(-g);
    const double slope = g.dot(step);
    double t = 1.0;
    int bt = 0;
    for (; bt < kMaxBacktracks; ++bt) {
      const double trial = objective(u + t * step);
      if (trial <= fval + kArmijoC * t * slope) {
        u += t * step;
        fval = trial;
        break;
      }
      t *= 0.5;
    }
    if (bt == kMaxBacktracks) break;  // stagnated at roundoff level
    g = gradient(u);
    ++iter;
  }

  ProbitSolution sol;
  sol.u_star = u;
  sol.b_star.resize(j_count);
  sol.coefficients.resize(j_count);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < j_count; ++i) {
    sol.b_star(i) = u(lab.set[i]);
    sol.coefficients(i) =
        problem.prior_variance_scale * probit_F(problem.noise, u(lab.set[i]), lab.y[i]);
    rhs(lab.set[i]) = probit_F(problem.noise, u(lab.set[i]), lab.y[i]);
  }
  sol.predicted_labels = classify_sign(u);
  sol.diagnostics.iterations = iter;
  sol.diagnostics.final_grad_norm = g.norm();
  sol.diagnostics.objective = fval;
  // EL residual in the eigenbasis: lambda o (Phi^T u) - Phi^T rhs.
  sol.diagnostics.el_residual =
      (lambda.cwiseProduct(phi.transpose() * u) - phi.transpose() * rhs).norm();
  return sol;
}

ProbitSolution solve_reduced(const ProbitProblem& problem, const SolverOptions& options) {
  problem.validate();
  const CovarianceOperator& cov = *problem.covariance;
  const LabelData lab = label_data(problem.labels);
  const int j_count = static_cast<int>(lab.set.size());
  if (j_count == 0) throw ContractViolation("solve_reduced requires a non-empty labelled set");

  const Eigen::MatrixXd sub =
      problem.prior_variance_scale * covariance_submatrix(cov, lab.set);
  const auto llt = chol_or_throw(sub);

  const auto f_vec = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd f(j_count);
    for (int i = 0; i < j_count; ++i) f(i) = probit_F(problem.noise, b(i), lab.y[i]);
    return f;
  };
  const auto objective = [&](const Eigen::VectorXd& b) {
    double val = 0.5 * b.dot(llt.solve(b));
    for (int i = 0; i < j_count; ++i) val += neg_log_cdf(problem.noise, b(i) * lab.y[i]);
    return val;
  };

  Eigen::VectorXd b = Eigen::VectorXd::Zero(j_count);
  Eigen::VectorXd grad = llt.solve(b) - f_vec(b);
  const double g0 = grad.norm();
  const double tol = options.tolerance * std::max(1.0, g0);

  int iter = 0;
  double fval = objective(b);
  while (grad.norm() > tol) {
    if (iter >= options.max_iterations)
      throw ConvergenceError("probit reduced Newton did not converge", iter, grad.norm(),
                             to_std(b));
    // Solve ((C')^{-1} + D) step = -grad as (I + C' D) step = -(b - C' F(b)).
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(j_count, j_count);
    for (int i = 0; i < j_count; ++i)
      lhs.col(i) += sub.col(i) * neg_log_cdf_dd(problem.noise, b(i) * lab.y[i]);
    const Eigen::VectorXd rhs = -(b - sub * f_vec(b));
    const Eigen::VectorXd step = lhs.partialPivLu().solve(rhs);
    const double slope = grad.dot(step);
    double t = 1.0;
    int bt = 0;
    for (; bt < kMaxBacktracks; ++bt) {
      const double trial = objective(b + t * step);
      if (trial <= fval + kArmijoC * t * slope) {
        b += t * step;
        fval = trial;
        break;
      }
      t *= 0.5;
    }
    if (bt == kMaxBacktracks) break;
    grad = llt.solve(b) - f_vec(b);
    ++iter;
  }

  ProbitSolution sol;
  sol.b_star = b;
  sol.coefficients = llt.solve(b);
  // u* = sum_j a_j c_j with the scale cancelling between (C')^{-1} and the
  // scaled columns.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(cov.n());
  for (int i = 0; i < j_count; ++i)
    u += (problem.prior_variance_scale * sol.coefficients(i)) * covariance_column(cov, lab.set[i]);
  sol.u_star = u;
  sol.predicted_labels = classify_sign(u);
  sol.diagnostics.iterations = iter;
  sol.diagnostics.final_grad_norm = grad.norm();
  sol.diagnostics.objective = fval;

  const Eigen::VectorXd lambda = cov.inv_eigenvalues / problem.prior_variance_scale;
  const Eigen::MatrixXd& phi = cov.decomposition.eigenvectors;
  Eigen::VectorXd rhs_full = Eigen::VectorXd::Zero(cov.n());
  for (int i = 0; i < j_count; ++i)
    rhs_full(lab.set[i]) = probit_F(problem.noise, u(lab.set[i]), lab.y[i]);
  sol.diagnostics.el_residual =
      (lambda.cwiseProduct(phi.transpose() * u) - phi.transpose() * rhs_full).norm();
  return sol;
}

ProbitSolution solve_truncated(const ProbitProblem& problem, int rank,
                               const SolverOptions& options) {
  problem.validate();
  const CovarianceOperator& cov = *problem.covariance;
  const LabelData lab = label_data(problem.labels);
  const int j_count = static_cast<int>(lab.set.size());
  if (j_count == 0) throw ContractViolation("solve_truncated requires a non-empty labelled set");

  const TruncatedCovariance trunc = truncate(cov, rank);
  const Eigen::MatrixXd sub =
      problem.prior_variance_scale * covariance_submatrix(trunc, lab.set);

  const auto f_vec = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd f(j_count);
    for (int i = 0; i < j_count; ++i) f(i) = probit_F(problem.noise, v(i), lab.y[i]);
    return f;
  };
  // Fixed-point residual G(v) = v - C_hat' F(v); its Jacobian I - C_hat' F'
  // is uniformly invertible because F is decreasing and C_hat' is PSD.
  const auto residual = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return v - sub * f_vec(v);
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(j_count);
  Eigen::VectorXd res = residual(v);
  const double r0 = res.norm();
  const double tol = options.tolerance * std::max(1.0, r0);

  int iter = 0;
  while (res.norm() > tol) {
    if (iter >= options.max_iterations)
      throw ConvergenceError("probit truncated fixed point did not converge", iter, res.norm(),
                             to_std(v));
    Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(j_count, j_count);
    for (int i = 0; i < j_count; ++i)
      jac.col(i) -= sub.col(i) * probit_F_ds(problem.noise, v(i), lab.y[i]);
    const Eigen::VectorXd step = jac.partialPivLu().solve(-res);
    double t = 1.0;
    const double merit = res.squaredNorm();
    int bt = 0;
    for (; bt < kMaxBacktracks; ++bt) {
      const Eigen::VectorXd trial = residual(v + t * step);
      if (trial.squaredNorm() <= merit * (1.0 - 1e-4 * t)) {
        v += t * step;
        res = trial;
        break;
      }
      t *= 0.5;
    }
    if (bt == kMaxBacktracks) break;
    ++iter;
  }

  ProbitSolution sol;
  sol.b_star = v;
  const Eigen::VectorXd f = f_vec(v);
  sol.coefficients = problem.prior_variance_scale * f;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cov.n());
  for (int i = 0; i < j_count; ++i) rhs(lab.set[i]) = f(i);
  // Extend through the truncated columns: u = s * V (lambda^{-1} o (V^T rhs)).
  const Eigen::VectorXd coeffs =
      (trunc.eigenvectors.transpose() * rhs).cwiseQuotient(trunc.inv_eigenvalues);
  sol.u_star = problem.prior_variance_scale * (trunc.eigenvectors * coeffs);
  sol.predicted_labels = classify_sign(sol.u_star);
  sol.diagnostics.iterations = iter;
  sol.diagnostics.final_grad_norm = res.norm();
  sol.diagnostics.objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd rhs_opt = Eigen::VectorXd::Zero(cov.n());
  for (int i = 0; i < j_count; ++i)
    rhs_opt(lab.set[i]) = probit_F(problem.noise, sol.u_star(lab.set[i]), lab.y[i]);
  const Eigen::VectorXd ext_coeffs =
      (trunc.eigenvectors.transpose() * rhs_opt).cwiseQuotient(trunc.inv_eigenvalues);
  sol.diagnostics.el_residual =
      (sol.u_star - problem.prior_variance_scale * (trunc.eigenvectors * ext_coeffs)).norm();
  return sol;
}

Eigen::VectorXd reconstruct(const Eigen::VectorXd& b_star, const CovarianceOperator& cov,
                            const std::vector<int>& labelled_set) {
  if (b_star.size() != static_cast<Eigen::Index>(labelled_set.size()))
    throw ContractViolation("b* length must match the labelled set");
  if (!b_star.allFinite()) throw ContractViolation("b* must be finite");
  const Eigen::MatrixXd sub = covariance_submatrix(cov, labelled_set);
  const auto llt = chol_or_throw(sub);
  const Eigen::VectorXd a = llt.solve(b_star);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(cov.n());
  for (std::size_t i = 0; i < labelled_set.size(); ++i)
    u += a(static_cast<Eigen::Index>(i)) * covariance_column(cov, labelled_set[i]);
  return u;
}

}  // namespace ssl
