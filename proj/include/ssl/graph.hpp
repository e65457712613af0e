#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ssl/kernel.hpp"
#include "ssl/point_cloud.hpp"

namespace ssl {

// Symmetric non-negative weight matrix with zero diagonal, plus node degrees.
struct WeightedGraph {
  Eigen::MatrixXd weights;  // W = W^T, w_ii = 0
  Eigen::VectorXd degrees;  // d_i = sum_j w_ij

  int n() const { return static_cast<int>(weights.rows()); }
};

// L = D^{-p} (D - W) D^{-p}. The two normalization exponents are kept equal
// so that L stays symmetric in the Euclidean inner product; p = 0 gives the
// unnormalized Laplacian used by all experiments.
struct GraphLaplacian {
  Eigen::MatrixXd matrix;
  double p = 0.0;
  Eigen::VectorXd source_degrees;

  int n() const { return static_cast<int>(matrix.rows()); }
  // Exact null vector D^p 1.
  Eigen::VectorXd null_vector() const;
};

// Connected components of the positive-weight adjacency structure.
struct ClusterPartition {
  std::vector<int> assignment;            // component id in 1..K per node
  int k = 0;                              // component count
  std::vector<std::vector<int>> members;  // node indices per component, ascending

  int n() const { return static_cast<int>(assignment.size()); }
};

// w_ij = kappa(|x_i - x_j|) for i != j, zero diagonal. Rows are filled in an
// OpenMP loop; build_weight_matrix_serial is the reference implementation the
// tests compare against bit-for-bit.
WeightedGraph build_weight_matrix(const PointCloud& cloud, const KernelSpec& spec);

namespace serial {
WeightedGraph build_weight_matrix(const PointCloud& cloud, const KernelSpec& spec);
}

// Throws OutlierNodeError when some node has zero degree.
GraphLaplacian build_laplacian(const WeightedGraph& graph, double p);

ClusterPartition connected_components(const WeightedGraph& graph, double threshold = 0.0);

// Normalized weighted indicators chi_k: entry d_j^p on cluster k, zero
// elsewhere. Returns K orthonormal vectors spanning the null space of the
// disconnected Laplacian.
std::vector<Eigen::VectorXd> weighted_indicators(const ClusterPartition& partition,
                                                 const WeightedGraph& graph, double p);

// Dense CSV export of W for debugging.
void write_weight_matrix_csv(const WeightedGraph& graph, const std::string& path);

}  // namespace ssl
