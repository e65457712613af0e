#include "ssl/graph.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "ssl/csv.hpp"
#include "ssl/errors.hpp"

namespace ssl {

namespace {

void fill_row(Eigen::MatrixXd& w, const Eigen::MatrixXd& pts, const KernelSpec& spec, int i) {
  const int n = static_cast<int>(pts.rows());
  for (int j = i + 1; j < n; ++j) {
    const double dist = (pts.row(i) - pts.row(j)).norm();
    w(i, j) = kernel_eval(spec, dist);
  }
}

WeightedGraph finish_weights(Eigen::MatrixXd w) {
  // Mirror the strict upper triangle so W = W^T holds bit-exactly.
  const int n = static_cast<int>(w.rows());
  for (int i = 0; i < n; ++i) {
    w(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) w(j, i) = w(i, j);
  }
  WeightedGraph g;
  g.weights = std::move(w);
  g.degrees = g.weights.rowwise().sum();
  return g;
}

}  // namespace

WeightedGraph build_weight_matrix(const PointCloud& cloud, const KernelSpec& spec) {
  cloud.validate();
  spec.validate();
  const int n = cloud.n();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) fill_row(w, cloud.points, spec, i);
  return finish_weights(std::move(w));
}

namespace serial {
WeightedGraph build_weight_matrix(const PointCloud& cloud, const KernelSpec& spec) {
  cloud.validate();
  spec.validate();
  const int n = cloud.n();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) fill_row(w, cloud.points, spec, i);
  return finish_weights(std::move(w));
}
}  // namespace serial

Eigen::VectorXd GraphLaplacian::null_vector() const {
  return source_degrees.array().pow(p).matrix();
}

GraphLaplacian build_laplacian(const WeightedGraph& graph, double p) {
  const int n = graph.n();
  for (int i = 0; i < n; ++i)
    if (!(graph.degrees(i) > 0)) throw OutlierNodeError(i);

  GraphLaplacian lap;
  lap.p = p;
  lap.source_degrees = graph.degrees;
  if (p == 0.0) {
    lap.matrix = -graph.weights;
    lap.matrix.diagonal() += graph.degrees;
  } else {
    const Eigen::VectorXd dinvp = graph.degrees.array().pow(-p).matrix();
    Eigen::MatrixXd dw = -graph.weights;
    dw.diagonal() += graph.degrees;
    lap.matrix = dinvp.asDiagonal() * dw * dinvp.asDiagonal();
    // Re-symmetrize; the scaling above commutes only in exact arithmetic.
    lap.matrix = 0.5 * (lap.matrix + lap.matrix.transpose()).eval();
  }
  return lap;
}

ClusterPartition connected_components(const WeightedGraph& graph, double threshold) {
  if (!(threshold >= 0)) throw ContractViolation("component threshold must be non-negative");
  const int n = graph.n();
  ClusterPartition part;
  part.assignment.assign(n, 0);
  std::vector<int> stack;
  for (int start = 0; start < n; ++start) {
    if (part.assignment[start] != 0) continue;
    ++part.k;
    part.assignment[start] = part.k;
    stack.push_back(start);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        if (part.assignment[j] == 0 && graph.weights(i, j) > threshold) {
          part.assignment[j] = part.k;
          stack.push_back(j);
        }
      }
    }
  }
  part.members.assign(part.k, {});
  for (int i = 0; i < n; ++i) part.members[part.assignment[i] - 1].push_back(i);
  return part;
}

std::vector<Eigen::VectorXd> weighted_indicators(const ClusterPartition& partition,
                                                 const WeightedGraph& graph, double p) {
  if (partition.n() != graph.n())
    throw ContractViolation("partition size does not match graph size");
  std::vector<Eigen::VectorXd> chis;
  chis.reserve(partition.k);
  for (int k = 0; k < partition.k; ++k) {
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(graph.n());
    for (int j : partition.members[k]) chi(j) = std::pow(graph.degrees(j), p);
    chis.push_back(chi / chi.norm());
  }
  return chis;
}

void write_weight_matrix_csv(const WeightedGraph& graph, const std::string& path) {
  std::string out;
  for (int i = 0; i < graph.n(); ++i) {
    std::vector<std::string> cells;
    cells.reserve(graph.n());
    for (int j = 0; j < graph.n(); ++j) cells.push_back(csv::format_double(graph.weights(i, j)));
    out += csv::join_row(cells);
  }
  csv::write_file(path, out);
}

}  // namespace ssl
