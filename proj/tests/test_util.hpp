#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ssl/experiments.hpp"
#include "ssl/graph.hpp"
#include "ssl/rng.hpp"
#include "ssl/spectral.hpp"

namespace ssl_test {

// Seed for which the hard-threshold graph on the three-Gaussian cloud has
// exactly three connected components matching the generating clusters
// (verified by test_experiments).
inline constexpr std::uint64_t kThreeClusterSeed = 3;

inline ssl::SyntheticData three_cluster_data() {
  return ssl::generate_mixture(ssl::SyntheticSpec::three_gaussians(kThreeClusterSeed));
}

// Small random cloud in the unit cube for property tests.
inline ssl::PointCloud random_cloud(int n, int dim, std::uint64_t seed) {
  ssl::PointCloud cloud;
  cloud.points.resize(n, dim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d)
      cloud.points(i, d) = ssl::rng::uniform01(
          ssl::rng::derive(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(d), 99));
  return cloud;
}

// Connected random graph: exponential kernel keeps every weight positive.
inline ssl::WeightedGraph random_graph(int n, std::uint64_t seed) {
  return ssl::build_weight_matrix(random_cloud(n, 3, seed), ssl::KernelSpec::exponential(0.5));
}

inline double uniform(std::uint64_t seed, std::uint64_t i, double lo, double hi) {
  return lo + (hi - lo) * ssl::rng::uniform01(ssl::rng::derive(seed, i, 0, 12345));
}

}  // namespace ssl_test
