#include "ssl/kernel.hpp"

#include <cmath>

#include "ssl/errors.hpp"

namespace ssl {

KernelSpec KernelSpec::hard_threshold(double r) {
  KernelSpec s;
  s.family = KernelFamily::HardThreshold;
  s.radius = r;
  s.validate();
  return s;
}

KernelSpec KernelSpec::perturbed_threshold(double r, double eps) {
  KernelSpec s;
  s.family = KernelFamily::PerturbedThreshold;
  s.radius = r;
  s.epsilon = eps;
  s.validate();
  return s;
}

KernelSpec KernelSpec::exponential(double sc) {
  KernelSpec s;
  s.family = KernelFamily::Exponential;
  s.scale = sc;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  switch (family) {
    case KernelFamily::HardThreshold:
      if (!(radius > 0)) throw ContractViolation("kernel radius must be positive");
      break;
    case KernelFamily::PerturbedThreshold:
      if (!(radius > 0)) throw ContractViolation("kernel radius must be positive");
      if (!(epsilon >= 0)) throw ContractViolation("kernel epsilon must be non-negative");
      break;
    case KernelFamily::Exponential:
      if (!(scale > 0)) throw ContractViolation("kernel scale must be positive");
      break;
  }
}

double kernel_eval(const KernelSpec& spec, double t) {
  if (!(t >= 0)) throw ContractViolation("kernel argument must be non-negative");
  switch (spec.family) {
    case KernelFamily::HardThreshold:
      return t <= spec.radius ? 1.0 : 0.0;
    case KernelFamily::PerturbedThreshold: {
      const double base = t <= spec.radius ? 1.0 : 0.0;
      if (spec.epsilon == 0.0) return base;
      const double w = spec.radius + spec.epsilon;
      return base + spec.epsilon * std::exp(-(t * t) / (w * w));
    }
    case KernelFamily::Exponential:
      return std::exp(-t / spec.scale);
  }
  return 0.0;
}

}  // namespace ssl
