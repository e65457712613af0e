#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssl {

// Thrown when a caller violates a documented precondition.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Graph has a node of zero degree; Laplacian normalization is undefined.
class OutlierNodeError : public std::runtime_error {
 public:
  explicit OutlierNodeError(int node)
      : std::runtime_error("graph has a zero-degree node at index " + std::to_string(node)),
        node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

// Newton iteration exhausted its iteration budget; carries the last iterate
// and its gradient norm.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(std::string what, int iterations, double grad_norm,
                   std::vector<double> last_iterate = {})
      : std::runtime_error(std::move(what)),
        iterations_(iterations),
        grad_norm_(grad_norm),
        last_iterate_(std::move(last_iterate)) {}
  int iterations() const { return iterations_; }
  double grad_norm() const { return grad_norm_; }
  const std::vector<double>& last_iterate() const { return last_iterate_; }

 private:
  int iterations_;
  double grad_norm_;
  std::vector<double> last_iterate_;
};

// Labelled-submatrix solve is numerically singular.
class IllConditionedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem exceeds a configured size cap.
class SizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ssl
