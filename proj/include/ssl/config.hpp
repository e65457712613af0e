#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ssl/experiments.hpp"
#include "ssl/noise.hpp"

namespace ssl {

// Parsed JSON run configuration shared by all CLI subcommands. Defaults
// reproduce the three-Gaussian experiments; any field can be overridden from
// the command line with --set dotted.key=value.
struct RunConfig {
  // dataset
  SyntheticSpec synthetic = SyntheticSpec::three_gaussians();
  std::string points_csv;  // when set, read the cloud instead of generating
  std::string truth_csv;   // optional ground-truth table for accuracy metrics

  // graph + covariance
  double kernel_radius = 0.25;
  double laplacian_p = 0.0;
  double tau = 0.1;
  double alpha = 2.0;
  double eps_over_tau2 = 0.01;
  int truncation = 10;

  // noise + labels
  NoiseFamily noise_family = NoiseFamily::Logistic;
  double gamma = 0.5;
  std::vector<int> labels_per_cluster = {1, 1, 1};

  // solver
  std::string method = "truncated";  // probit: full | reduced | truncated
  int max_iterations = 100;

  // sweep grids
  std::vector<double> grid_alpha;
  std::vector<double> grid_eps_over_tau2;
  std::vector<double> grid_tau = {0.1};
  std::vector<double> spectrum_eps;
  std::vector<double> spectrum_tau = {0.1};

  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;

  nlohmann::json raw;  // config after overrides, echoed into the manifest
};

// Parse a JSON object (already loaded) into a RunConfig; unknown keys are
// rejected so typos fail loudly.
RunConfig parse_config(const nlohmann::json& j);

// Apply key=value with dotted paths onto a JSON tree; values parse as JSON
// when possible and fall back to strings.
void apply_override(nlohmann::json& j, const std::string& key_value);

// Log-spaced helper for grid shorthands.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace ssl
