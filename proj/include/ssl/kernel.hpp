#pragma once

namespace ssl {

enum class KernelFamily { HardThreshold, PerturbedThreshold, Exponential };

// Radial affinity kernel kappa(t) evaluated on pairwise Euclidean distances.
//
//   HardThreshold(r):          kappa(t) = 1 if t <= r, else 0
//   PerturbedThreshold(r,eps): kappa(t) + eps * exp(-t^2 / (r+eps)^2)
//   Exponential(s):            exp(-t/s)
//
// The perturbed kernel keeps the three-cluster graph connected for any
// eps > 0 while inter-cluster edges stay O(eps).
struct KernelSpec {
  KernelFamily family = KernelFamily::HardThreshold;
  double radius = 0.25;   // r, for the threshold families
  double epsilon = 0.0;   // eps >= 0, PerturbedThreshold only
  double scale = 1.0;     // s, Exponential only

  static KernelSpec hard_threshold(double r);
  static KernelSpec perturbed_threshold(double r, double eps);
  static KernelSpec exponential(double s);

  void validate() const;
};

// kappa(t) for t >= 0. Throws ContractViolation on negative t.
double kernel_eval(const KernelSpec& spec, double t);

}  // namespace ssl
