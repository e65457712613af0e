#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ssl/quadrature.hpp"

namespace ssl {

enum class NoiseFamily { Logistic, Gaussian };

// Symmetric log-concave noise density psi_gamma(t) = (1/gamma) psi(t/gamma)
// with CDF Psi_gamma. gamma is the scale parameter of the named family
// (logistic scale, Gaussian standard deviation), matching the formulas the
// experiments use. Construct with std_normalized = true to reinterpret gamma
// as the standard deviation for the logistic family as well.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::Logistic;
  double gamma = 1.0;

  static NoiseModel logistic(double gamma, bool std_normalized = false);
  static NoiseModel gaussian(double gamma);

  void validate() const;
};

double pdf(const NoiseModel& model, double t);
double cdf(const NoiseModel& model, double t);
// Inverse CDF on (0,1); logistic closed form, Gaussian via Wichura's AS 241.
double inverse_cdf(const NoiseModel& model, double u);
// -log Psi_gamma(t), evaluated in log space so deep tails stay finite.
double neg_log_cdf(const NoiseModel& model, double t);
// d^2/dt^2 of -log Psi_gamma(t); strictly positive (log-concavity).
double neg_log_cdf_dd(const NoiseModel& model, double t);

// F_j(s) = y psi(s y) / Psi(s y) for y in {-1,+1}; the sign of the result
// equals y. Tail ratios are evaluated asymptotically for large |s|/gamma.
double probit_F(const NoiseModel& model, double s, int y);
// dF/ds = -neg_log_cdf_dd(s y); always negative.
double probit_F_ds(const NoiseModel& model, double s, int y);

// Binary labels on a labelled subset Z' (zero-based node indices).
struct BinaryLabels {
  std::vector<int> labelled_set;
  std::vector<int> values;  // -1 or +1, aligned with labelled_set

  int count() const { return static_cast<int>(labelled_set.size()); }
  void validate(int n_nodes) const;
};

// Multi-class labels in 1..M on a labelled subset.
struct MultiLabels {
  std::vector<int> labelled_set;
  std::vector<int> values;  // in 1..class_count
  int class_count = 2;

  int count() const { return static_cast<int>(labelled_set.size()); }
  void validate(int n_nodes) const;
};

// Probit likelihood potential Phi = -sum_j log Psi_gamma(u_j y_j) over Z';
// u_on_labels is aligned with labels.labelled_set.
double probit_potential(const NoiseModel& model, const Eigen::VectorXd& u_on_labels,
                        const BinaryLabels& labels);

// One-hot class probability
//   Psi_breve(v; m) = int psi_gamma(t) prod_{l != m} Psi_gamma(t + v_m - v_l) dt,
// computed after substituting u = Psi_gamma(t), which maps the integral onto
// (0,1) with a smooth bounded integrand whose accuracy is gamma-independent.
// m is 1-based.
double onehot_psi_breve(const NoiseModel& model, const Eigen::VectorXd& v, int m,
                        const QuadratureRule& rule);

// Analytic gradient of Psi_breve(v; m) via the same substitution. The m-th
// component is the negated sum of the others, which enforces shift invariance
// exactly.
Eigen::VectorXd onehot_psi_breve_grad(const NoiseModel& model, const Eigen::VectorXd& v, int m,
                                      const QuadratureRule& rule);

// Observation models. Draws are addressed by (seed, node, component) so the
// samplers are pure and trials can run concurrently with identical output.
BinaryLabels sample_binary_labels(const Eigen::VectorXd& u_truth,
                                  const std::vector<int>& labelled_set, const NoiseModel& model,
                                  std::uint64_t seed);
MultiLabels sample_multiclass_labels(const Eigen::MatrixXd& u_truth,
                                     const std::vector<int>& labelled_set, const NoiseModel& model,
                                     std::uint64_t seed);

// S(t) = +1 iff t >= 0.
std::vector<int> classify_sign(const Eigen::VectorXd& u);
// Per-column argmax, ties to the smallest index; labels in 1..M.
std::vector<int> classify_argmax(const Eigen::MatrixXd& u);

}  // namespace ssl
