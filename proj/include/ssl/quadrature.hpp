#pragma once

#include <Eigen/Dense>

namespace ssl {

// Gauss-Legendre rule on the unit interval. Weights are positive and sum to
// one. 128 nodes resolve the substituted one-hot integrand to ~1e-12 for
// class margins up to ~10 noise scales.
struct QuadratureRule {
  Eigen::VectorXd nodes;    // in (0,1), ascending
  Eigen::VectorXd weights;  // positive, sum 1

  int node_count() const { return static_cast<int>(nodes.size()); }
};

QuadratureRule gauss_legendre_unit(int node_count = 128);

}  // namespace ssl
