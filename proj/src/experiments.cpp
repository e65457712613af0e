#include "ssl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ssl/csv.hpp"
#include "ssl/errors.hpp"
#include "ssl/onehot_solver.hpp"
#include "ssl/probit_solver.hpp"
#include "ssl/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssl {

namespace {

// Runs fn(i) for i in [0, count). threads == 1 is the serial reference path;
// results must be written into per-index slots so both paths are bit-equal.
template <typename Fn>
void for_each_index(int count, int threads, Fn&& fn) {
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
#ifdef _OPENMP
  if (threads > 1) omp_set_num_threads(threads);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) fn(i);
#else
  for (int i = 0; i < count; ++i) fn(i);
#endif
}

std::vector<int> binary_truth_labels(const SyntheticData& data) {
  std::vector<int> t(data.n());
  for (int i = 0; i < data.n(); ++i) t[i] = data.binary_truth(i) >= 0 ? 1 : -1;
  return t;
}

struct CellProblem {
  CovarianceOperator covariance;
};

// Graph + covariance for one grid cell; the weight matrix is built with the
// serial kernel because the cells themselves are the parallel dimension.
CellProblem build_cell(const SyntheticData& data, double kernel_radius, double laplacian_p,
                       double epsilon, double tau, double alpha) {
  const KernelSpec kernel = KernelSpec::perturbed_threshold(kernel_radius, epsilon);
  const WeightedGraph graph = serial::build_weight_matrix(data.cloud, kernel);
  const GraphLaplacian lap = build_laplacian(graph, laplacian_p);
  return {covariance_from(eigendecompose(lap), tau * tau, alpha)};
}

}  // namespace

SyntheticSpec SyntheticSpec::three_gaussians(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.centers = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)};
  spec.per_cluster = {50, 50, 50};
  // Per-coordinate spread 0.1: keeps each blob dense under the 0.25-radius
  // kernel while the clusters stay disconnected from each other.
  spec.variance = 0.01;
  spec.seed = seed;
  return spec;
}

void SyntheticSpec::validate() const {
  if (centers.empty() || centers.size() != per_cluster.size())
    throw ContractViolation("mixture spec needs one center per cluster");
  const auto dim = centers.front().size();
  for (const auto& c : centers)
    if (c.size() != dim) throw ContractViolation("mixture centers must share a dimension");
  for (int count : per_cluster)
    if (count < 1) throw ContractViolation("mixture cluster counts must be >= 1");
  if (!(variance > 0)) throw ContractViolation("mixture variance must be positive");
}

int SyntheticSpec::total_points() const {
  int total = 0;
  for (int c : per_cluster) total += c;
  return total;
}

SyntheticData generate_mixture(const SyntheticSpec& spec) {
  spec.validate();
  const int n = spec.total_points();
  const int dim = static_cast<int>(spec.centers.front().size());
  const int k = static_cast<int>(spec.centers.size());
  const double sd = std::sqrt(spec.variance);
  const NoiseModel unit = NoiseModel::gaussian(1.0);

  SyntheticData data;
  data.seed = spec.seed;
  data.cloud.points.resize(n, dim);
  data.cluster_of.resize(n);
  int row = 0;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < spec.per_cluster[c]; ++i, ++row) {
      data.cluster_of[row] = c + 1;
      for (int d = 0; d < dim; ++d) {
        const double u = rng::uniform01(rng::derive(spec.seed, static_cast<std::uint64_t>(row),
                                                    static_cast<std::uint64_t>(d), 1));
        data.cloud.points(row, d) = spec.centers[c](d) + sd * inverse_cdf(unit, u);
      }
    }
  }
  data.binary_truth.resize(n);
  data.onehot_truth = Eigen::MatrixXd::Zero(k, n);
  data.class_truth.resize(n);
  for (int i = 0; i < n; ++i) {
    const int c = data.cluster_of[i];
    data.binary_truth(i) = c < k ? 1.0 : -1.0;
    data.onehot_truth(c - 1, i) = 1.0;
    data.class_truth[i] = c;
  }
  return data;
}

double misclassification_rate(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw ContractViolation("misclassification_rate: length mismatch");
  if (predicted.empty()) throw ContractViolation("misclassification_rate: empty input");
  int wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] != truth[i]) ++wrong;
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

void SweepGrid::validate() const {
  if (alpha_values.empty() || eps_over_tau2_values.empty())
    throw ContractViolation("sweep grid must have alpha and eps/tau^2 values");
  for (double a : alpha_values)
    if (!(a > 0)) throw ContractViolation("alpha values must be positive");
  for (double e : eps_over_tau2_values)
    if (!(e >= 0)) throw ContractViolation("eps/tau^2 values must be non-negative");
  if (tau_values.size() != 1 && tau_values.size() != eps_over_tau2_values.size())
    throw ContractViolation("tau_values must hold one value or pair with eps/tau^2 values");
  for (double t : tau_values)
    if (!(t > 0)) throw ContractViolation("tau values must be positive");
  if (!(gamma > 0) || !(kernel_radius > 0) || truncation < 1)
    throw ContractViolation("sweep grid has non-positive parameters");
}

double SweepGrid::tau_for(std::size_t eps_index) const {
  return tau_values.size() == 1 ? tau_values[0] : tau_values[eps_index];
}

std::vector<int> place_labels(const std::vector<int>& cluster_of, int k,
                              const std::vector<int>& counts) {
  if (static_cast<int>(counts.size()) != k)
    throw ContractViolation("label counts must list one entry per cluster");
  bool any = false;
  for (int c : counts) {
    if (c < 0) throw ContractViolation("label counts must be non-negative");
    if (c > 0) any = true;
  }
  if (!any) throw ContractViolation("at least one cluster must carry a label");
  std::vector<int> remaining = counts;
  std::vector<int> chosen;
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    const int c = cluster_of[i] - 1;
    if (c < 0 || c >= k) throw ContractViolation("cluster id out of range");
    if (remaining[c] > 0) {
      chosen.push_back(static_cast<int>(i));
      --remaining[c];
    }
  }
  for (int c = 0; c < k; ++c)
    if (remaining[c] > 0)
      throw ContractViolation("label count exceeds cluster size for cluster " +
                              std::to_string(c + 1));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::vector<int> place_labels(const ClusterPartition& partition, const std::vector<int>& counts) {
  return place_labels(partition.assignment, partition.k, counts);
}

namespace {

HeatmapRow run_probit_cell(const SweepGrid& grid, const SyntheticData& data, double alpha,
                           double eps_over_tau2, double tau, const std::vector<int>& labelled,
                           const std::vector<Eigen::VectorXd>& indicator_basis) {
  HeatmapRow row;
  row.alpha = alpha;
  row.eps_over_tau2 = eps_over_tau2;
  row.tau = tau;
  try {
    const CellProblem cell = build_cell(data, grid.kernel_radius, grid.laplacian_p,
                                        eps_over_tau2 * tau * tau, tau, alpha);
    ProbitProblem problem;
    problem.covariance = &cell.covariance;
    problem.noise = NoiseModel{grid.noise_family, grid.gamma};
    problem.labels.labelled_set = labelled;
    for (int j : labelled) problem.labels.values.push_back(data.binary_truth(j) >= 0 ? 1 : -1);
    const int rank = std::min(grid.truncation, cell.covariance.n());
    const ProbitSolution sol = solve_truncated(problem, rank);
    row.rate = misclassification_rate(sol.predicted_labels, binary_truth_labels(data));
    row.iterations = sol.diagnostics.iterations;
    row.proj_residual_raw = projection_residual(sol.u_star, indicator_basis);
    const double norm = sol.u_star.norm();
    row.proj_residual_normalized = norm > 0 ? row.proj_residual_raw / norm : 0.0;
  } catch (const std::exception& e) {
    row.solver_ok = false;
    row.status = e.what();
    row.rate = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

HeatmapRow run_onehot_cell(const SweepGrid& grid, const SyntheticData& data, double alpha,
                           double eps_over_tau2, double tau, const std::vector<int>& labelled) {
  HeatmapRow row;
  row.alpha = alpha;
  row.eps_over_tau2 = eps_over_tau2;
  row.tau = tau;
  try {
    const CellProblem cell = build_cell(data, grid.kernel_radius, grid.laplacian_p,
                                        eps_over_tau2 * tau * tau, tau, alpha);
    OneHotProblem problem;
    problem.covariance = &cell.covariance;
    problem.noise = NoiseModel{grid.noise_family, grid.gamma};
    problem.quadrature = gauss_legendre_unit();
    problem.labels.class_count = data.k();
    problem.labels.labelled_set = labelled;
    for (int j : labelled) problem.labels.values.push_back(data.class_truth[j]);
    problem.truncation_rank = std::min(grid.truncation, cell.covariance.n());
    const OneHotSolution sol = solve_reduced(problem);
    row.rate = misclassification_rate(sol.predicted_labels, data.class_truth);
    row.iterations = sol.diagnostics.iterations;
  } catch (const std::exception& e) {
    row.solver_ok = false;
    row.status = e.what();
    row.rate = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

std::vector<Eigen::VectorXd> base_indicator_basis(const SyntheticData& data, double kernel_radius,
                                                  double laplacian_p) {
  const WeightedGraph base =
      serial::build_weight_matrix(data.cloud, KernelSpec::hard_threshold(kernel_radius));
  const ClusterPartition partition = connected_components(base);
  return weighted_indicators(partition, base, laplacian_p);
}

}  // namespace

HeatmapTable sweep_accuracy(const SweepGrid& grid, const SyntheticData& data, int threads) {
  grid.validate();
  const std::vector<int> labelled = place_labels(data.cluster_of, data.k(), grid.labels_per_cluster);
  const std::vector<Eigen::VectorXd> basis =
      grid.method == SweepMethod::Probit
          ? base_indicator_basis(data, grid.kernel_radius, grid.laplacian_p)
          : std::vector<Eigen::VectorXd>{};

  const int n_alpha = static_cast<int>(grid.alpha_values.size());
  const int n_eps = static_cast<int>(grid.eps_over_tau2_values.size());
  HeatmapTable table(static_cast<std::size_t>(n_alpha) * n_eps);

  for_each_index(n_alpha * n_eps, threads, [&](int cell) {
    const int ai = cell / n_eps;
    const int ei = cell % n_eps;
    const double alpha = grid.alpha_values[ai];
    const double eps_over_tau2 = grid.eps_over_tau2_values[ei];
    const double tau = grid.tau_for(ei);
    table[cell] = grid.method == SweepMethod::Probit
                      ? run_probit_cell(grid, data, alpha, eps_over_tau2, tau, labelled, basis)
                      : run_onehot_cell(grid, data, alpha, eps_over_tau2, tau, labelled);
  });
  return table;
}

SuccessEstimate success_probability(const SweepGrid& grid, double alpha, double eps_over_tau2,
                                    double tau, const SyntheticData& data, int trials,
                                    std::uint64_t seed, int threads) {
  grid.validate();
  if (trials < 1) throw ContractViolation("success probability needs trials >= 1");
  const std::vector<int> labelled = place_labels(data.cluster_of, data.k(), grid.labels_per_cluster);
  const CellProblem cell =
      build_cell(data, grid.kernel_radius, grid.laplacian_p, eps_over_tau2 * tau * tau, tau, alpha);
  const NoiseModel noise{grid.noise_family, grid.gamma};
  const int rank = std::min(grid.truncation, cell.covariance.n());
  const std::vector<int> bin_truth = binary_truth_labels(data);
  const QuadratureRule rule = gauss_legendre_unit();

  std::vector<char> success(trials, 0);
  for_each_index(trials, threads, [&](int t) {
    const std::uint64_t trial_seed = rng::derive(seed, static_cast<std::uint64_t>(t), 0, 2);
    try {
      if (grid.method == SweepMethod::Probit) {
        ProbitProblem problem;
        problem.covariance = &cell.covariance;
        problem.noise = noise;
        problem.labels = sample_binary_labels(data.binary_truth, labelled, noise, trial_seed);
        const ProbitSolution sol = solve_truncated(problem, rank);
        success[t] = sol.predicted_labels == bin_truth ? 1 : 0;
      } else {
        OneHotProblem problem;
        problem.covariance = &cell.covariance;
        problem.noise = noise;
        problem.quadrature = rule;
        problem.labels = sample_multiclass_labels(data.onehot_truth, labelled, noise, trial_seed);
        problem.truncation_rank = rank;
        const OneHotSolution sol = solve_reduced(problem);
        success[t] = sol.predicted_labels == data.class_truth ? 1 : 0;
      }
    } catch (const std::exception&) {
      success[t] = 0;
    }
  });

  SuccessEstimate est;
  est.trials = trials;
  for (char s : success) est.success_count += s;
  est.estimate = static_cast<double>(est.success_count) / trials;
  est.standard_error = std::sqrt(est.estimate * (1.0 - est.estimate) / trials);
  return est;
}

std::vector<SpectralSweepRow> spectral_sweep(const std::vector<double>& eps_values,
                                             const std::vector<double>& tau_values, double alpha,
                                             const SyntheticData& data, double kernel_radius,
                                             double laplacian_p) {
  if (eps_values.empty() || tau_values.empty())
    throw ContractViolation("spectral sweep needs epsilon and tau values");
  const std::vector<Eigen::VectorXd> basis = base_indicator_basis(data, kernel_radius, laplacian_p);

  std::vector<SpectralSweepRow> rows;
  rows.reserve(eps_values.size() * tau_values.size());
  for (double eps : eps_values) {
    const KernelSpec kernel = KernelSpec::perturbed_threshold(kernel_radius, eps);
    const WeightedGraph graph = build_weight_matrix(data.cloud, kernel);
    const GraphLaplacian lap = build_laplacian(graph, laplacian_p);
    const EigenDecomposition decomp = eigendecompose(lap);
    for (double tau : tau_values) {
      const CovarianceOperator cov = covariance_from(decomp, tau * tau, alpha);
      SpectralSweepRow row;
      row.epsilon = eps;
      row.tau2 = tau * tau;
      row.lambdas = cov.inv_eigenvalues;
      row.sigmas = cov.decomposition.eigenvalues;
      row.lambda2 = cov.n() > 1 ? cov.inv_eigenvalues(1) : 0.0;
      row.lambda3 = cov.n() > 2 ? cov.inv_eigenvalues(2) : 0.0;
      row.lambda4 = cov.n() > 3 ? cov.inv_eigenvalues(3) : 0.0;
      if (cov.n() > 2) {
        row.proj_residual_2 = projection_residual(cov.decomposition.eigenvectors.col(1), basis);
        row.proj_residual_3 = projection_residual(cov.decomposition.eigenvectors.col(2), basis);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

HeatmapTable balance_study(const std::vector<int>& label_counts, const SweepGrid& grid,
                           const SyntheticData& data, int threads) {
  SweepGrid adjusted = grid;
  adjusted.labels_per_cluster = label_counts;
  return sweep_accuracy(adjusted, data, threads);
}

int transition_index(const HeatmapTable& row_cells, double threshold) {
  for (std::size_t i = 0; i < row_cells.size(); ++i)
    if (row_cells[i].solver_ok && row_cells[i].rate > threshold) return static_cast<int>(i);
  return -1;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ContractViolation("log-log slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw ContractViolation("log-log slope needs positive samples");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string heatmap_csv(const HeatmapTable& table) {
  std::string out = "alpha,eps_over_tau2,tau2,rate,iterations,solver_ok,status\n";
  for (const auto& row : table) {
    out += csv::join_row({csv::format_double(row.alpha), csv::format_double(row.eps_over_tau2),
                          csv::format_double(row.tau * row.tau), csv::format_double(row.rate),
                          std::to_string(row.iterations), row.solver_ok ? "1" : "0", row.status});
  }
  return out;
}

std::string spectral_sweep_csv(const std::vector<SpectralSweepRow>& rows) {
  std::string out = "epsilon,tau2,lambda2,lambda3,lambda4,proj_residual_2,proj_residual_3\n";
  for (const auto& row : rows) {
    out += csv::join_row({csv::format_double(row.epsilon), csv::format_double(row.tau2),
                          csv::format_double(row.lambda2), csv::format_double(row.lambda3),
                          csv::format_double(row.lambda4), csv::format_double(row.proj_residual_2),
                          csv::format_double(row.proj_residual_3)});
  }
  return out;
}

std::string spectral_report_csv(const std::vector<SpectralSweepRow>& rows, double alpha) {
  std::string out = "epsilon,tau2,alpha,k,sigma_k,lambda_k\n";
  for (const auto& row : rows) {
    for (int k = 0; k < row.sigmas.size(); ++k) {
      out += csv::join_row({csv::format_double(row.epsilon), csv::format_double(row.tau2),
                            csv::format_double(alpha), std::to_string(k + 1),
                            csv::format_double(row.sigmas(k)), csv::format_double(row.lambdas(k))});
    }
  }
  return out;
}

}  // namespace ssl
