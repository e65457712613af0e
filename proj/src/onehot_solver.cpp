#include "ssl/onehot_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>

#include "ssl/errors.hpp"

namespace ssl {

namespace {

constexpr double kArmijoC = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kPsiFloor = 1e-300;
constexpr double kHessStep = 1e-6;

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
        "use a truncated covariance");
  return llt;
}

// f_j(v) = grad log Psi_breve(v; m): the Euler-Lagrange driving term.
struct LikelihoodEval {
  const NoiseModel& noise;
  const QuadratureRule& rule;
  mutable int floor_hits = 0;

  double log_psi(const Eigen::VectorXd& v, int m) const {
    double val = onehot_psi_breve(noise, v, m, rule);
    if (val < kPsiFloor) {
      val = kPsiFloor;
      ++floor_hits;
    }
    return std::log(val);
  }

  Eigen::VectorXd f(const Eigen::VectorXd& v, int m) const {
    double val = onehot_psi_breve(noise, v, m, rule);
    if (val < kPsiFloor) {
      val = kPsiFloor;
      ++floor_hits;
    }
    return onehot_psi_breve_grad(noise, v, m, rule) / val;
  }

  // Hessian of -log Psi_breve by central differences of the analytic
  // gradient; symmetrized.
  Eigen::MatrixXd neg_log_hessian(const Eigen::VectorXd& v, int m) const {
    const int m_count = static_cast<int>(v.size());
    Eigen::MatrixXd h(m_count, m_count);
    Eigen::VectorXd vp = v, vm = v;
    for (int c = 0; c < m_count; ++c) {
      vp(c) += kHessStep;
      vm(c) -= kHessStep;
      h.col(c) = -(f(vp, m) - f(vm, m)) / (2.0 * kHessStep);
      vp(c) = v(c);
      vm(c) = v(c);
    }
    return 0.5 * (h + h.transpose());
  }
};

std::vector<double> to_std(const Eigen::MatrixXd& b) {
  return std::vector<double>(b.data(), b.data() + b.size());
}

}  // namespace

void OneHotProblem::validate() const {
  if (covariance == nullptr) throw ContractViolation("one-hot problem needs a covariance");
  noise.validate();
  labels.validate(covariance->n());
  if (quadrature.node_count() < 1) throw ContractViolation("one-hot problem needs a quadrature rule");
  if (truncation_rank && (*truncation_rank < 1 || *truncation_rank > covariance->n()))
    throw ContractViolation("truncation rank out of range");
}

OneHotSolution solve_reduced(const OneHotProblem& problem, const OneHotOptions& options) {
  problem.validate();
  const CovarianceOperator& cov = *problem.covariance;
  const auto& lab = problem.labels;
  const int j_count = lab.count();
  const int m_count = lab.class_count;
  if (j_count == 0) throw ContractViolation("solve_reduced requires a non-empty labelled set");

  std::optional<TruncatedCovariance> trunc;
  if (problem.truncation_rank) trunc = truncate(cov, *problem.truncation_rank);
  const Eigen::MatrixXd sub = trunc ? covariance_submatrix(*trunc, lab.labelled_set)
                                    : covariance_submatrix(cov, lab.labelled_set);
  const auto llt = chol_or_throw(sub);

  LikelihoodEval like{problem.noise, problem.quadrature};

  const auto likelihood_grad = [&](const Eigen::MatrixXd& b) {
    Eigen::MatrixXd g(m_count, j_count);
    for (int i = 0; i < j_count; ++i) g.col(i) = like.f(b.col(i), lab.values[i]);
    return g;
  };
  const auto objective = [&](const Eigen::MatrixXd& b) {
    // 1/2 <(C')^{-1}, B^T B>_F through the Cholesky factor.
    double val = 0.5 * (llt.solve(b.transpose()).array() * b.transpose().array()).sum();
    for (int i = 0; i < j_count; ++i) val -= like.log_psi(b.col(i), lab.values[i]);
    return val;
  };
  const auto gradient = [&](const Eigen::MatrixXd& b) -> Eigen::MatrixXd {
    return llt.solve(b.transpose()).transpose() - likelihood_grad(b);
  };

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_count, j_count);
  Eigen::MatrixXd grad = gradient(b);
  const double g0 = grad.norm();
  const double tol = options.tolerance * std::max(1.0, g0);

  int iter = 0;
  double fval = objective(b);
  const int dim = m_count * j_count;
  while (grad.norm() > tol) {
    if (iter >= options.max_iterations)
      throw ConvergenceError("one-hot reduced Newton did not converge", iter, grad.norm(),
                             to_std(b));
    // (I + (C' (x) I) blockdiag(H_i)) step = -(vec B - vec(G C')), the Newton
    // system premultiplied by C' (x) I so no inverse of C' is formed.
    std::vector<Eigen::MatrixXd> blocks(j_count);
    for (int i = 0; i < j_count; ++i) blocks[i] = like.neg_log_hessian(b.col(i), lab.values[i]);
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(dim, dim);
    for (int i = 0; i < j_count; ++i)
      for (int k = 0; k < j_count; ++k)
        lhs.block(i * m_count, k * m_count, m_count, m_count) += sub(i, k) * blocks[k];
    const Eigen::MatrixXd g_like = likelihood_grad(b);
    Eigen::MatrixXd rhs_mat = -(b - g_like * sub);
    const Eigen::VectorXd step_vec =
        lhs.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs_mat.data(), dim));
    const Eigen::Map<const Eigen::MatrixXd> step(step_vec.data(), m_count, j_count);

    const double slope = (grad.array() * step.array()).sum();
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
    grad = gradient(b);
    ++iter;
  }

  OneHotSolution sol;
  sol.b_star = b;
  // U* = sum_j bb*_j c_j^T, bb* the columns of B* (C')^{-T}.
  const Eigen::MatrixXd x = llt.solve(b.transpose()).transpose();  // M x J
  Eigen::MatrixXd cols(cov.n(), j_count);
  for (int i = 0; i < j_count; ++i)
    cols.col(i) = trunc ? covariance_column(*trunc, lab.labelled_set[i])
                        : covariance_column(cov, lab.labelled_set[i]);
  sol.u_star = x * cols.transpose();
  sol.predicted_labels = classify_argmax(sol.u_star);
  sol.diagnostics.iterations = iter;
  sol.diagnostics.final_grad_norm = grad.norm();
  sol.diagnostics.objective = fval;
  sol.diagnostics.el_residual = grad.norm();
  sol.psi_floor_hits = like.floor_hits;
  return sol;
}

OneHotSolution solve_full(const OneHotProblem& problem, const OneHotOptions& options) {
  problem.validate();
  const CovarianceOperator& cov = *problem.covariance;
  const auto& lab = problem.labels;
  const int n = cov.n();
  const int m_count = lab.class_count;
  if (static_cast<long long>(m_count) * n > options.full_size_cap)
    throw SizeError("one-hot full solve exceeds the size cap");
  if (problem.truncation_rank)
    throw ContractViolation("one-hot full solve requires the untruncated covariance");

  const Eigen::VectorXd& lambda = cov.inv_eigenvalues;
  const Eigen::MatrixXd& phi = cov.decomposition.eigenvectors;
  const Eigen::MatrixXd precision = phi * lambda.asDiagonal() * phi.transpose();
  const int j_count = lab.count();

  LikelihoodEval like{problem.noise, problem.quadrature};

  const auto objective = [&](const Eigen::MatrixXd& u) {
    double val = 0.5 * (u * precision).cwiseProduct(u).sum();
    for (int i = 0; i < j_count; ++i)
      val -= like.log_psi(u.col(lab.labelled_set[i]), lab.values[i]);
    return val;
  };
  const auto gradient = [&](const Eigen::MatrixXd& u) {
    Eigen::MatrixXd g = u * precision;
    for (int i = 0; i < j_count; ++i)
      g.col(lab.labelled_set[i]) -= like.f(u.col(lab.labelled_set[i]), lab.values[i]);
    return g;
  };

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m_count, n);
  Eigen::MatrixXd grad = gradient(u);
  const double g0 = grad.norm();
  const double tol = options.tolerance * std::max(1.0, g0);

  int iter = 0;
  double fval = objective(u);
  const int dim = m_count * n;
  while (grad.norm() > tol) {
    if (iter >= options.max_iterations)
      throw ConvergenceError("one-hot full Newton did not converge", iter, grad.norm(), to_std(u));
    Eigen::MatrixXd lhs(dim, dim);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        lhs.block(j * m_count, l * m_count, m_count, m_count) =
            precision(j, l) * Eigen::MatrixXd::Identity(m_count, m_count);
    for (int i = 0; i < j_count; ++i) {
      const int j = lab.labelled_set[i];
      lhs.block(j * m_count, j * m_count, m_count, m_count) +=
          like.neg_log_hessian(u.col(j), lab.values[i]);
    }
    Eigen::MatrixXd neg_grad = -grad;
    const Eigen::VectorXd step_vec =
        Eigen::LLT<Eigen::MatrixXd>(lhs).solve(Eigen::Map<const Eigen::VectorXd>(neg_grad.data(), dim));
    const Eigen::Map<const Eigen::MatrixXd> step(step_vec.data(), m_count, n);

    const double slope = (grad.array() * step.array()).sum();
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
    if (bt == kMaxBacktracks) break;
    grad = gradient(u);
    ++iter;
  }

  OneHotSolution sol;
  sol.u_star = u;
  sol.b_star.resize(m_count, j_count);
  for (int i = 0; i < j_count; ++i) sol.b_star.col(i) = u.col(lab.labelled_set[i]);
  sol.predicted_labels = classify_argmax(u);
  sol.diagnostics.iterations = iter;
  sol.diagnostics.final_grad_norm = grad.norm();
  sol.diagnostics.objective = fval;
  sol.diagnostics.el_residual = grad.norm();
  sol.psi_floor_hits = like.floor_hits;
  return sol;
}

Eigen::MatrixXd reconstruct_onehot(const Eigen::MatrixXd& b_star, const CovarianceOperator& cov,
                                   const std::vector<int>& labelled_set) {
  if (b_star.cols() != static_cast<Eigen::Index>(labelled_set.size()))
    throw ContractViolation("B* column count must match the labelled set");
  if (!b_star.allFinite()) throw ContractViolation("B* must be finite");
  const Eigen::MatrixXd sub = covariance_submatrix(cov, labelled_set);
  const auto llt = chol_or_throw(sub);
  const Eigen::MatrixXd x = llt.solve(b_star.transpose()).transpose();
  Eigen::MatrixXd cols(cov.n(), static_cast<Eigen::Index>(labelled_set.size()));
  for (std::size_t i = 0; i < labelled_set.size(); ++i)
    cols.col(static_cast<Eigen::Index>(i)) = covariance_column(cov, labelled_set[i]);
  return x * cols.transpose();
}

}  // namespace ssl
