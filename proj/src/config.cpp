#include "ssl/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ssl/errors.hpp"

namespace ssl {

namespace {

std::vector<double> parse_value_list(const nlohmann::json& j, const std::string& what) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else if (j.is_object()) {
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int count = j.at("count").get<int>();
    const bool log_scale = j.value("log", true);
    if (count < 1) throw ContractViolation(what + ": count must be >= 1");
    if (log_scale) {
      out = log_spaced(lo, hi, count);
    } else {
      for (int i = 0; i < count; ++i)
        out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    }
  } else {
    out.push_back(j.get<double>());
  }
  if (out.empty()) throw ContractViolation(what + ": empty value list");
  return out;
}

NoiseFamily parse_family(const std::string& name) {
  if (name == "logistic") return NoiseFamily::Logistic;
  if (name == "gaussian") return NoiseFamily::Gaussian;
  throw ContractViolation("unknown noise family: " + name);
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& scope) {
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ContractViolation("unknown config key: " + scope + key);
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > 0)) throw ContractViolation("log-spaced range must be positive");
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (int i = 0; i < count; ++i) out.push_back(std::exp(llo + (lhi - llo) * i / (count - 1)));
  return out;
}

RunConfig parse_config(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.raw = j;
  reject_unknown(j, {"dataset", "kernel", "laplacian", "covariance", "noise", "labels", "solver",
                     "grid", "spectrum", "trials", "seed", "threads"},
                 "");

  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    reject_unknown(d, {"centers", "per_cluster", "variance", "seed", "points_csv", "truth_csv"},
                   "dataset.");
    if (d.contains("centers")) {
      cfg.synthetic.centers.clear();
      for (const auto& c : d.at("centers")) {
        Eigen::VectorXd center(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) center(i) = c[i].get<double>();
        cfg.synthetic.centers.push_back(std::move(center));
      }
    }
    if (d.contains("per_cluster"))
      cfg.synthetic.per_cluster = d.at("per_cluster").get<std::vector<int>>();
    if (d.contains("variance")) cfg.synthetic.variance = d.at("variance").get<double>();
    if (d.contains("seed")) cfg.synthetic.seed = d.at("seed").get<std::uint64_t>();
    if (d.contains("points_csv")) cfg.points_csv = d.at("points_csv").get<std::string>();
    if (d.contains("truth_csv")) cfg.truth_csv = d.at("truth_csv").get<std::string>();
  }
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    reject_unknown(k, {"radius"}, "kernel.");
    if (k.contains("radius")) cfg.kernel_radius = k.at("radius").get<double>();
  }
  if (j.contains("laplacian")) {
    const auto& l = j.at("laplacian");
    reject_unknown(l, {"p"}, "laplacian.");
    if (l.contains("p")) cfg.laplacian_p = l.at("p").get<double>();
  }
  if (j.contains("covariance")) {
    const auto& c = j.at("covariance");
    reject_unknown(c, {"tau", "alpha", "eps_over_tau2", "truncation"}, "covariance.");
    if (c.contains("tau")) cfg.tau = c.at("tau").get<double>();
    if (c.contains("alpha")) cfg.alpha = c.at("alpha").get<double>();
    if (c.contains("eps_over_tau2")) cfg.eps_over_tau2 = c.at("eps_over_tau2").get<double>();
    if (c.contains("truncation")) cfg.truncation = c.at("truncation").get<int>();
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    reject_unknown(n, {"family", "gamma"}, "noise.");
    if (n.contains("family")) cfg.noise_family = parse_family(n.at("family").get<std::string>());
    if (n.contains("gamma")) cfg.gamma = n.at("gamma").get<double>();
  }
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    reject_unknown(l, {"per_cluster"}, "labels.");
    if (l.contains("per_cluster"))
      cfg.labels_per_cluster = l.at("per_cluster").get<std::vector<int>>();
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, {"method", "max_iterations"}, "solver.");
    if (s.contains("method")) cfg.method = s.at("method").get<std::string>();
    if (s.contains("max_iterations")) cfg.max_iterations = s.at("max_iterations").get<int>();
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"alpha", "eps_over_tau2", "tau"}, "grid.");
    if (g.contains("alpha")) cfg.grid_alpha = parse_value_list(g.at("alpha"), "grid.alpha");
    if (g.contains("eps_over_tau2"))
      cfg.grid_eps_over_tau2 = parse_value_list(g.at("eps_over_tau2"), "grid.eps_over_tau2");
    if (g.contains("tau")) cfg.grid_tau = parse_value_list(g.at("tau"), "grid.tau");
  }
  if (j.contains("spectrum")) {
    const auto& s = j.at("spectrum");
    reject_unknown(s, {"epsilon", "tau"}, "spectrum.");
    if (s.contains("epsilon")) cfg.spectrum_eps = parse_value_list(s.at("epsilon"), "spectrum.epsilon");
    if (s.contains("tau")) cfg.spectrum_tau = parse_value_list(s.at("tau"), "spectrum.tau");
  }
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();

  // Default sweep grid: the paper's parameter box with a reproducible layout.
  if (cfg.grid_alpha.empty()) cfg.grid_alpha = log_spaced(0.25, 10.0, 20);
  if (cfg.grid_eps_over_tau2.empty()) cfg.grid_eps_over_tau2 = log_spaced(0.01, 0.5, 20);
  if (cfg.spectrum_eps.empty()) cfg.spectrum_eps = log_spaced(1e-5, 1e-3, 5);
  return cfg;
}

void apply_override(nlohmann::json& j, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos)
    throw ContractViolation("override must look like key=value: " + key_value);
  const std::string path = key_value.substr(0, eq);
  const std::string value = key_value.substr(eq + 1);

  nlohmann::json* node = &j;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ContractViolation("empty override key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);

  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;  // plain string
  (*node)[parts.back()] = parsed;
}

}  // namespace ssl
