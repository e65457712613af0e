#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ssl/graph.hpp"
#include "ssl/noise.hpp"
#include "ssl/point_cloud.hpp"
#include "ssl/spectral.hpp"

namespace ssl {

// Gaussian mixture generator for the synthetic K-cluster dataset.
struct SyntheticSpec {
  std::vector<Eigen::VectorXd> centers;
  std::vector<int> per_cluster;
  double variance = 0.1;
  std::uint64_t seed = 1;

  // Three isotropic Gaussians at (1,0,0), (0,1,0), (0,0,1), 50 points each.
  static SyntheticSpec three_gaussians(std::uint64_t seed = 1);

  void validate() const;
  int total_points() const;
};

struct SyntheticData {
  PointCloud cloud;
  std::vector<int> cluster_of;      // ground-truth cluster id, 1..K
  Eigen::VectorXd binary_truth;     // +1 on clusters 1..K-1, -1 on cluster K
  Eigen::MatrixXd onehot_truth;     // K x N, one-hot columns with margin 1
  std::vector<int> class_truth;     // cluster id as class label
  std::uint64_t seed = 0;

  int n() const { return cloud.n(); }
  int k() const { return static_cast<int>(onehot_truth.rows()); }
};

SyntheticData generate_mixture(const SyntheticSpec& spec);

// Fraction of differing entries; throws ContractViolation on length mismatch.
double misclassification_rate(const std::vector<int>& predicted, const std::vector<int>& truth);

enum class SweepMethod { Probit, OneHot };

// Parameter grid for the accuracy heat maps. epsilon is derived per cell as
// (eps/tau^2) * tau^2. tau_values holds either a single value used for every
// cell or one value per eps_over_tau2 entry (paired index-wise).
struct SweepGrid {
  std::vector<double> alpha_values;
  std::vector<double> eps_over_tau2_values;
  std::vector<double> tau_values = {0.1};
  double gamma = 0.5;
  double kernel_radius = 0.25;
  int truncation = 10;
  SweepMethod method = SweepMethod::Probit;
  std::vector<int> labels_per_cluster = {1, 1, 1};
  NoiseFamily noise_family = NoiseFamily::Logistic;
  double laplacian_p = 0.0;

  void validate() const;
  double tau_for(std::size_t eps_index) const;
};

struct HeatmapRow {
  double alpha = 0.0;
  double eps_over_tau2 = 0.0;
  double tau = 0.0;
  double rate = 1.0;
  int iterations = 0;
  bool solver_ok = true;
  std::string status = "ok";
  double proj_residual_raw = 0.0;         // ||(I-P0) u*|| against cluster indicators
  double proj_residual_normalized = 0.0;  // same, after normalizing u*
};

using HeatmapTable = std::vector<HeatmapRow>;

// One row per (alpha, eps/tau^2) cell in deterministic order (alpha outer).
// Exact labels, placed on the first labels_per_cluster[k] nodes of each
// cluster. Cells run in an OpenMP loop when threads != 1; threads == 1 is the
// serial reference path and produces bit-identical rows.
HeatmapTable sweep_accuracy(const SweepGrid& grid, const SyntheticData& data, int threads = 0);

struct SuccessEstimate {
  int success_count = 0;
  int trials = 0;
  double estimate = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo success probability for a single grid cell: per trial, resample
// labels through the noise model, solve, count success iff every node is
// labelled correctly. Trials own independent substreams of `seed`.
SuccessEstimate success_probability(const SweepGrid& grid, double alpha, double eps_over_tau2,
                                    double tau, const SyntheticData& data, int trials,
                                    std::uint64_t seed, int threads = 0);

struct SpectralSweepRow {
  double epsilon = 0.0;
  double tau2 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  double proj_residual_2 = 0.0;  // ||(I-P0) phi_2||
  double proj_residual_3 = 0.0;
  Eigen::VectorXd sigmas;
  Eigen::VectorXd lambdas;
};

// Low-lying spectrum of C^{-1} on the perturbed graph for each (epsilon, tau)
// pair, with eigenvector drift measured against the indicators of the
// unperturbed partition.
std::vector<SpectralSweepRow> spectral_sweep(const std::vector<double>& eps_values,
                                             const std::vector<double>& tau_values, double alpha,
                                             const SyntheticData& data, double kernel_radius = 0.25,
                                             double laplacian_p = 0.0);

// Accuracy sweep with an explicit per-cluster label allocation; throws when a
// count exceeds its cluster size.
HeatmapTable balance_study(const std::vector<int>& label_counts, const SweepGrid& grid,
                           const SyntheticData& data, int threads = 0);

// First index along a heatmap row whose rate exceeds `threshold`; -1 if none.
int transition_index(const HeatmapTable& row_cells, double threshold = 0.25);

// Deterministic helpers shared by the harness and the CLI.
std::vector<int> place_labels(const ClusterPartition& partition, const std::vector<int>& counts);
std::vector<int> place_labels(const std::vector<int>& cluster_of, int k,
                              const std::vector<int>& counts);

// Ordinary least squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// CSV emitters (fixed headers, LF line endings, round-trip precision).
std::string heatmap_csv(const HeatmapTable& table);
std::string spectral_sweep_csv(const std::vector<SpectralSweepRow>& rows);
// Long-form spectral report rows: epsilon, tau2, alpha, k, sigma_k, lambda_k.
std::string spectral_report_csv(const std::vector<SpectralSweepRow>& rows, double alpha);

}  // namespace ssl
