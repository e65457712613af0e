#include "ssl/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssl/errors.hpp"
#include "ssl/rng.hpp"

namespace ssl {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2 pi))

// ---- standard logistic -------------------------------------------------

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_pdf_std(double x) {
  const double e = std::exp(-std::abs(x));
  const double d = 1.0 + e;
  return e / (d * d);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

// ---- standard normal ----------------------------------------------------

double norm_pdf_std(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_cdf_std(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Asymptotic series for Phi(x) ~ phi(x)/(-x) * S(x) as x -> -infinity.
double mills_series(double x) {
  const double ix2 = 1.0 / (x * x);
  return 1.0 + ix2 * (-1.0 + ix2 * (3.0 + ix2 * (-15.0 + ix2 * (105.0 - 945.0 * ix2))));
}

// phi(x)/Phi(x), accurate over the whole real line.
double norm_ratio_std(double x) {
  if (x <= -26.0) return -x / mills_series(x);
  return norm_pdf_std(x) / norm_cdf_std(x);
}

// -log Phi(x) in log space for deep tails.
double norm_neg_log_cdf_std(double x) {
  if (x <= -37.0) return 0.5 * x * x + kLogSqrt2Pi + std::log(-x) - std::log(mills_series(x));
  return -std::log(norm_cdf_std(x));
}

// d^2/dx^2 of -log Phi(x) = r(x) * (x + r(x)); the tail branch evaluates
// x + r(x) through the series to avoid catastrophic cancellation.
double norm_neg_log_cdf_dd_std(double x) {
  if (x <= -26.0) {
    const double s = mills_series(x);
    const double ix = 1.0 / x;
    const double ix2 = ix * ix;
    // x*(S-1) expanded: -1/x + 3/x^3 - 15/x^5 + 105/x^7 - 945/x^9
    const double x_plus_r =
        (-ix + ix * ix2 * (3.0 + ix2 * (-15.0 + ix2 * (105.0 - 945.0 * ix2)))) / s;
    return (-x / s) * x_plus_r;
  }
  const double r = norm_ratio_std(x);
  return r * (x + r);
}

// Wichura's AS 241 (PPND16): inverse of the standard normal CDF.
double norm_icdf_std(double p) {
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  r = q < 0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0 ? -val : val;
}

// Standard-family CDF at (Psi^{-1}(u) + delta), branch-free of overflow.
double cdf_shift_logistic(double u, double delta) {
  // sigma(logit(u) + delta) = u e^delta / (u e^delta + 1 - u)
  if (delta >= 0) {
    const double e = std::exp(-delta);
    return u / (u + (1.0 - u) * e);
  }
  const double e = std::exp(delta);
  const double ue = u * e;
  return ue / (ue + (1.0 - u));
}

struct StdFamily {
  NoiseFamily family;
  double icdf(double u) const {
    return family == NoiseFamily::Logistic ? std::log(u / (1.0 - u)) : norm_icdf_std(u);
  }
  double cdf_shift(double u, double z, double delta) const {
    if (family == NoiseFamily::Logistic) return cdf_shift_logistic(u, delta);
    return norm_cdf_std(z + delta);
  }
  double pdf(double x) const {
    return family == NoiseFamily::Logistic ? logistic_pdf_std(x) : norm_pdf_std(x);
  }
};

}  // namespace

NoiseModel NoiseModel::logistic(double gamma, bool std_normalized) {
  NoiseModel m;
  m.family = NoiseFamily::Logistic;
  // The logistic with scale s has standard deviation s*pi/sqrt(3).
  m.gamma = std_normalized ? gamma * std::sqrt(3.0) / M_PI : gamma;
  m.validate();
  return m;
}

NoiseModel NoiseModel::gaussian(double gamma) {
  NoiseModel m;
  m.family = NoiseFamily::Gaussian;
  m.gamma = gamma;
  m.validate();
  return m;
}

void NoiseModel::validate() const {
  if (!(gamma > 0) || !std::isfinite(gamma))
    throw ContractViolation("noise scale gamma must be positive and finite");
}

double pdf(const NoiseModel& model, double t) {
  const double x = t / model.gamma;
  if (model.family == NoiseFamily::Logistic) return logistic_pdf_std(x) / model.gamma;
  return norm_pdf_std(x) / model.gamma;
}

double cdf(const NoiseModel& model, double t) {
  const double x = t / model.gamma;
  if (model.family == NoiseFamily::Logistic) return sigmoid(x);
  return norm_cdf_std(x);
}

double inverse_cdf(const NoiseModel& model, double u) {
  if (!(u > 0.0 && u < 1.0)) throw ContractViolation("inverse CDF argument must lie in (0,1)");
  if (model.family == NoiseFamily::Logistic) return model.gamma * std::log(u / (1.0 - u));
  return model.gamma * norm_icdf_std(u);
}

double neg_log_cdf(const NoiseModel& model, double t) {
  const double x = t / model.gamma;
  if (model.family == NoiseFamily::Logistic) return softplus(-x);
  return norm_neg_log_cdf_std(x);
}

double neg_log_cdf_dd(const NoiseModel& model, double t) {
  const double x = t / model.gamma;
  const double g2 = model.gamma * model.gamma;
  if (model.family == NoiseFamily::Logistic) {
    const double s = sigmoid(x);
    return s * (1.0 - s) / g2;
  }
  return norm_neg_log_cdf_dd_std(x) / g2;
}

double probit_F(const NoiseModel& model, double s, int y) {
  if (y != 1 && y != -1) throw ContractViolation("binary label must be -1 or +1");
  const double x = s * y / model.gamma;
  if (model.family == NoiseFamily::Logistic) {
    // psi/Psi = (1/gamma) (1 - Psi), exact for the logistic.
    return y * sigmoid(-x) / model.gamma;
  }
  return y * norm_ratio_std(x) / model.gamma;
}

double probit_F_ds(const NoiseModel& model, double s, int y) {
  return -neg_log_cdf_dd(model, s * y);
}

void BinaryLabels::validate(int n_nodes) const {
  if (labelled_set.size() != values.size())
    throw ContractViolation("label index/value size mismatch");
  std::vector<bool> seen(n_nodes, false);
  for (std::size_t i = 0; i < labelled_set.size(); ++i) {
    const int j = labelled_set[i];
    if (j < 0 || j >= n_nodes) throw ContractViolation("labelled index out of range");
    if (seen[j]) throw ContractViolation("duplicate labelled index");
    seen[j] = true;
    if (values[i] != 1 && values[i] != -1) throw ContractViolation("binary label must be -1 or +1");
  }
}

void MultiLabels::validate(int n_nodes) const {
  if (class_count < 2) throw ContractViolation("multi-class problems need M >= 2");
  if (labelled_set.size() != values.size())
    throw ContractViolation("label index/value size mismatch");
  std::vector<bool> seen(n_nodes, false);
  for (std::size_t i = 0; i < labelled_set.size(); ++i) {
    const int j = labelled_set[i];
    if (j < 0 || j >= n_nodes) throw ContractViolation("labelled index out of range");
    if (seen[j]) throw ContractViolation("duplicate labelled index");
    seen[j] = true;
    if (values[i] < 1 || values[i] > class_count)
      throw ContractViolation("class label out of range");
  }
}

double probit_potential(const NoiseModel& model, const Eigen::VectorXd& u_on_labels,
                        const BinaryLabels& labels) {
  if (u_on_labels.size() != labels.count())
    throw ContractViolation("latent/label size mismatch");
  double phi = 0.0;
  for (int i = 0; i < labels.count(); ++i)
    phi += neg_log_cdf(model, u_on_labels(i) * labels.values[i]);
  return phi;
}

double onehot_psi_breve(const NoiseModel& model, const Eigen::VectorXd& v, int m,
                        const QuadratureRule& rule) {
  const int m_count = static_cast<int>(v.size());
  if (m < 1 || m > m_count) throw ContractViolation("class index out of range");
  if (m_count == 1) return 1.0;
  const StdFamily std_family{model.family};

  Eigen::VectorXd deltas(m_count);  // (v_m - v_l)/gamma
  for (int l = 0; l < m_count; ++l) deltas(l) = (v(m - 1) - v(l)) / model.gamma;

  double total = 0.0;
  for (int q = 0; q < rule.node_count(); ++q) {
    const double u = rule.nodes(q);
    const double z = std_family.icdf(u);
    double prod = 1.0;
    for (int l = 0; l < m_count; ++l) {
      if (l == m - 1) continue;
      prod *= std_family.cdf_shift(u, z, deltas(l));
    }
    total += rule.weights(q) * prod;
  }
  return total;
}

Eigen::VectorXd onehot_psi_breve_grad(const NoiseModel& model, const Eigen::VectorXd& v, int m,
                                      const QuadratureRule& rule) {
  const int m_count = static_cast<int>(v.size());
  if (m < 1 || m > m_count) throw ContractViolation("class index out of range");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(m_count);
  if (m_count == 1) return grad;
  const StdFamily std_family{model.family};

  Eigen::VectorXd deltas(m_count);
  for (int l = 0; l < m_count; ++l) deltas(l) = (v(m - 1) - v(l)) / model.gamma;

  Eigen::VectorXd factors(m_count);
  for (int q = 0; q < rule.node_count(); ++q) {
    const double u = rule.nodes(q);
    const double z = std_family.icdf(u);
    for (int l = 0; l < m_count; ++l)
      if (l != m - 1) factors(l) = std_family.cdf_shift(u, z, deltas(l));
    for (int i = 0; i < m_count; ++i) {
      if (i == m - 1) continue;
      double prod = std_family.pdf(z + deltas(i));
      for (int l = 0; l < m_count; ++l)
        if (l != i && l != m - 1) prod *= factors(l);
      grad(i) -= rule.weights(q) * prod;
    }
  }
  grad /= model.gamma;
  // The diagonal component follows from shift invariance of Psi_breve.
  grad(m - 1) = -(grad.sum() - grad(m - 1));
  return grad;
}

BinaryLabels sample_binary_labels(const Eigen::VectorXd& u_truth,
                                  const std::vector<int>& labelled_set, const NoiseModel& model,
                                  std::uint64_t seed) {
  BinaryLabels labels;
  labels.labelled_set = labelled_set;
  labels.values.reserve(labelled_set.size());
  for (int j : labelled_set) {
    if (j < 0 || j >= u_truth.size()) throw ContractViolation("labelled index out of range");
    const double u = rng::uniform01(rng::derive(seed, static_cast<std::uint64_t>(j), 0));
    const double eta = inverse_cdf(model, u);
    labels.values.push_back(u_truth(j) + eta >= 0 ? 1 : -1);
  }
  return labels;
}

MultiLabels sample_multiclass_labels(const Eigen::MatrixXd& u_truth,
                                     const std::vector<int>& labelled_set, const NoiseModel& model,
                                     std::uint64_t seed) {
  const int m_count = static_cast<int>(u_truth.rows());
  MultiLabels labels;
  labels.class_count = m_count;
  labels.labelled_set = labelled_set;
  labels.values.reserve(labelled_set.size());
  for (int j : labelled_set) {
    if (j < 0 || j >= u_truth.cols()) throw ContractViolation("labelled index out of range");
    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < m_count; ++m) {
      const double u =
          rng::uniform01(rng::derive(seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(m + 1)));
      const double val = u_truth(m, j) + inverse_cdf(model, u);
      if (val > best_val) {
        best_val = val;
        best = m;
      }
    }
    labels.values.push_back(best + 1);
  }
  return labels;
}

std::vector<int> classify_sign(const Eigen::VectorXd& u) {
  std::vector<int> out(u.size());
  for (int i = 0; i < u.size(); ++i) out[i] = u(i) >= 0 ? 1 : -1;
  return out;
}

std::vector<int> classify_argmax(const Eigen::MatrixXd& u) {
  std::vector<int> out(u.cols());
  for (int j = 0; j < u.cols(); ++j) {
    int best = 0;
    for (int m = 1; m < u.rows(); ++m)
      if (u(m, j) > u(best, j)) best = m;
    out[j] = best + 1;
  }
  return out;
}

}  // namespace ssl
