#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ssl/config.hpp"
#include "ssl/csv.hpp"
#include "ssl/errors.hpp"
#include "ssl/experiments.hpp"
#include "ssl/onehot_solver.hpp"
#include "ssl/probit_solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitConfigError = 2;
constexpr int kExitSolverError = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::string method = "probit";
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_threads = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("-o,--output", args.out_dir, "output directory");
  cmd->add_option("--set", args.overrides, "config override key=value (repeatable)");
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t s) { args.seed = s; args.has_seed = true; },
      "top-level RNG seed");
  cmd->add_option_function<int>(
      "--threads", [&args](int t) { args.threads = t; args.has_threads = true; },
      "worker thread cap");
}

ssl::RunConfig load_config(const CommonArgs& args) {
  json tree = json::object();
  if (!args.config_path.empty()) {
    std::ifstream f(args.config_path);
    if (!f) throw ssl::ContractViolation("cannot open config file: " + args.config_path);
    tree = json::parse(f);
  }
  for (const auto& kv : args.overrides) ssl::apply_override(tree, kv);
  ssl::RunConfig cfg = ssl::parse_config(tree);
  if (args.has_seed) cfg.synthetic.seed = cfg.seed = args.seed;
  if (args.has_threads) {
    cfg.threads = args.threads;
  } else if (cfg.threads == 0) {
    if (const char* env = std::getenv("SSL_LAB_THREADS")) cfg.threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  return cfg;
}

ssl::SyntheticData load_dataset(const ssl::RunConfig& cfg) {
  if (cfg.points_csv.empty()) return ssl::generate_mixture(cfg.synthetic);

  ssl::SyntheticData data;
  data.cloud = ssl::read_point_cloud_csv(cfg.points_csv);
  data.seed = cfg.seed;
  if (cfg.truth_csv.empty())
    throw ssl::ContractViolation("dataset.points_csv requires dataset.truth_csv");
  std::ifstream f(cfg.truth_csv);
  if (!f) throw ssl::ContractViolation("cannot open truth file: " + cfg.truth_csv);
  std::string line;
  std::getline(f, line);  // header
  data.cluster_of.assign(data.cloud.n(), 0);
  int k = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    int node, cluster;
    if (std::sscanf(line.c_str(), "%d,%d", &node, &cluster) != 2)
      throw ssl::ContractViolation("bad truth row: " + line);
    if (node < 0 || node >= data.cloud.n()) throw ssl::ContractViolation("truth node out of range");
    data.cluster_of[node] = cluster;
    k = std::max(k, cluster);
  }
  data.binary_truth.resize(data.cloud.n());
  data.onehot_truth = Eigen::MatrixXd::Zero(k, data.cloud.n());
  data.class_truth.resize(data.cloud.n());
  for (int i = 0; i < data.cloud.n(); ++i) {
    const int c = data.cluster_of[i];
    if (c < 1 || c > k) throw ssl::ContractViolation("truth file leaves a node unassigned");
    data.binary_truth(i) = c < k ? 1.0 : -1.0;
    data.onehot_truth(c - 1, i) = 1.0;
    data.class_truth[i] = c;
  }
  return data;
}

ssl::SweepGrid grid_from_config(const ssl::RunConfig& cfg, const std::string& method) {
  ssl::SweepGrid grid;
  grid.alpha_values = cfg.grid_alpha;
  grid.eps_over_tau2_values = cfg.grid_eps_over_tau2;
  grid.tau_values = cfg.grid_tau;
  grid.gamma = cfg.gamma;
  grid.kernel_radius = cfg.kernel_radius;
  grid.truncation = cfg.truncation;
  grid.labels_per_cluster = cfg.labels_per_cluster;
  grid.noise_family = cfg.noise_family;
  grid.laplacian_p = cfg.laplacian_p;
  grid.method = method == "onehot" ? ssl::SweepMethod::OneHot : ssl::SweepMethod::Probit;
  return grid;
}

json manifest_base(const std::string& command, const CommonArgs& args,
                   const ssl::RunConfig& cfg) {
  json m;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["dataset_seed"] = cfg.synthetic.seed;
  m["threads"] = cfg.threads;
  m["overrides"] = args.overrides;
  m["config"] = cfg.raw;
  m["version"] = "1.0.0";
  m["status"] = "ok";
  m["outputs"] = json::array();
  return m;
}

void finish_manifest(json& manifest, const fs::path& dir,
                     std::chrono::steady_clock::time_point start) {
  manifest["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream f(dir / "manifest.json");
  f << manifest.dump(2) << "\n";
}

void write_output(json& manifest, const fs::path& dir, const std::string& name,
                  const std::string& contents) {
  ssl::csv::write_file((dir / name).string(), contents);
  manifest["outputs"].push_back(name);
}

int cmd_gen_data(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = ssl::generate_mixture(cfg.synthetic);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("gen-data", args, cfg);

  ssl::write_point_cloud_csv(data.cloud, (dir / "points.csv").string());
  manifest["outputs"].push_back("points.csv");

  std::string truth = "node,cluster,binary_label,class_label\n";
  for (int i = 0; i < data.n(); ++i)
    truth += ssl::csv::join_row({std::to_string(i), std::to_string(data.cluster_of[i]),
                                 std::to_string(data.binary_truth(i) >= 0 ? 1 : -1),
                                 std::to_string(data.class_truth[i])});
  write_output(manifest, dir, "truth.csv", truth);

  // Component count of the unperturbed graph, for the record.
  const auto graph = ssl::build_weight_matrix(data.cloud, ssl::KernelSpec::hard_threshold(cfg.kernel_radius));
  manifest["base_graph_components"] = ssl::connected_components(graph).k;
  finish_manifest(manifest, dir, start);
  return 0;
}

int cmd_spectrum(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const auto rows = ssl::spectral_sweep(cfg.spectrum_eps, cfg.spectrum_tau, cfg.alpha, data,
                                        cfg.kernel_radius, cfg.laplacian_p);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("spectrum", args, cfg);
  write_output(manifest, dir, "spectral_sweep.csv", ssl::spectral_sweep_csv(rows));
  write_output(manifest, dir, "spectrum_report.csv", ssl::spectral_report_csv(rows, cfg.alpha));
  finish_manifest(manifest, dir, start);
  return 0;
}

json diagnostics_json(const ssl::SolveDiagnostics& d) {
  return json{{"iterations", d.iterations},
              {"final_grad_norm", d.final_grad_norm},
              {"objective", d.objective},
              {"el_residual", d.el_residual}};
}

int cmd_probit(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("probit", args, cfg);

  const double eps = cfg.eps_over_tau2 * cfg.tau * cfg.tau;
  const auto graph = ssl::build_weight_matrix(
      data.cloud, ssl::KernelSpec::perturbed_threshold(cfg.kernel_radius, eps));
  const auto lap = ssl::build_laplacian(graph, cfg.laplacian_p);
  const auto cov = ssl::covariance_from(ssl::eigendecompose(lap), cfg.tau * cfg.tau, cfg.alpha);

  ssl::ProbitProblem problem;
  problem.covariance = &cov;
  problem.noise = ssl::NoiseModel{cfg.noise_family, cfg.gamma};
  problem.labels.labelled_set = ssl::place_labels(data.cluster_of, data.k(), cfg.labels_per_cluster);
  for (int j : problem.labels.labelled_set)
    problem.labels.values.push_back(data.binary_truth(j) >= 0 ? 1 : -1);

  ssl::SolverOptions options;
  options.max_iterations = cfg.max_iterations;
  ssl::ProbitSolution sol;
  try {
    if (cfg.method == "full") {
      sol = ssl::solve_full(problem, options);
    } else if (cfg.method == "reduced") {
      sol = ssl::solve_reduced(problem, options);
    } else {
      sol = ssl::solve_truncated(problem, std::min(cfg.truncation, cov.n()), options);
    }
  } catch (const std::exception& e) {
    manifest["status"] = std::string("solver_error: ") + e.what();
    finish_manifest(manifest, dir, start);
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  }

  json out;
  out["u_star"] = std::vector<double>(sol.u_star.data(), sol.u_star.data() + sol.u_star.size());
  out["b_star"] = std::vector<double>(sol.b_star.data(), sol.b_star.data() + sol.b_star.size());
  out["labels"] = sol.predicted_labels;
  out["labelled_set"] = problem.labels.labelled_set;
  out["observed_labels"] = problem.labels.values;
  out["diagnostics"] = diagnostics_json(sol.diagnostics);
  out["misclassification_rate"] =
      ssl::misclassification_rate(sol.predicted_labels, [&] {
        std::vector<int> t(data.n());
        for (int i = 0; i < data.n(); ++i) t[i] = data.binary_truth(i) >= 0 ? 1 : -1;
        return t;
      }());
  ssl::csv::write_file((dir / "solution.json").string(), out.dump(2) + "\n");
  manifest["outputs"].push_back("solution.json");

  std::string labels_csv = "node,u,label\n";
  for (int i = 0; i < data.n(); ++i)
    labels_csv += ssl::csv::join_row({std::to_string(i), ssl::csv::format_double(sol.u_star(i)),
                                      std::to_string(sol.predicted_labels[i])});
  write_output(manifest, dir, "labels.csv", labels_csv);
  finish_manifest(manifest, dir, start);
  return 0;
}

int cmd_onehot(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("onehot", args, cfg);

  const double eps = cfg.eps_over_tau2 * cfg.tau * cfg.tau;
  const auto graph = ssl::build_weight_matrix(
      data.cloud, ssl::KernelSpec::perturbed_threshold(cfg.kernel_radius, eps));
  const auto lap = ssl::build_laplacian(graph, cfg.laplacian_p);
  const auto cov = ssl::covariance_from(ssl::eigendecompose(lap), cfg.tau * cfg.tau, cfg.alpha);

  ssl::OneHotProblem problem;
  problem.covariance = &cov;
  problem.noise = ssl::NoiseModel{cfg.noise_family, cfg.gamma};
  problem.quadrature = ssl::gauss_legendre_unit();
  problem.labels.class_count = data.k();
  problem.labels.labelled_set = ssl::place_labels(data.cluster_of, data.k(), cfg.labels_per_cluster);
  for (int j : problem.labels.labelled_set) problem.labels.values.push_back(data.class_truth[j]);
  if (cfg.method != "full") problem.truncation_rank = std::min(cfg.truncation, cov.n());

  ssl::OneHotOptions options;
  options.max_iterations = cfg.max_iterations;
  ssl::OneHotSolution sol;
  try {
    sol = cfg.method == "full" ? ssl::solve_full(problem, options)
                               : ssl::solve_reduced(problem, options);
  } catch (const std::exception& e) {
    manifest["status"] = std::string("solver_error: ") + e.what();
    finish_manifest(manifest, dir, start);
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  }

  json out;
  json u_rows = json::array();
  for (int m = 0; m < sol.u_star.rows(); ++m) {
    std::vector<double> r(sol.u_star.cols());
    for (int i = 0; i < sol.u_star.cols(); ++i) r[i] = sol.u_star(m, i);
    u_rows.push_back(r);
  }
  out["U_star"] = u_rows;  // row-major: one array per class
  json b_rows = json::array();
  for (int m = 0; m < sol.b_star.rows(); ++m) {
    std::vector<double> r(sol.b_star.cols());
    for (int i = 0; i < sol.b_star.cols(); ++i) r[i] = sol.b_star(m, i);
    b_rows.push_back(r);
  }
  out["B_star"] = b_rows;
  out["labels"] = sol.predicted_labels;
  out["labelled_set"] = problem.labels.labelled_set;
  out["observed_labels"] = problem.labels.values;
  out["diagnostics"] = diagnostics_json(sol.diagnostics);
  out["psi_floor_hits"] = sol.psi_floor_hits;
  out["misclassification_rate"] =
      ssl::misclassification_rate(sol.predicted_labels, data.class_truth);
  ssl::csv::write_file((dir / "solution.json").string(), out.dump(2) + "\n");
  manifest["outputs"].push_back("solution.json");

  std::string labels_csv = "node,label\n";
  for (int i = 0; i < data.n(); ++i)
    labels_csv += ssl::csv::join_row({std::to_string(i), std::to_string(sol.predicted_labels[i])});
  write_output(manifest, dir, "labels.csv", labels_csv);
  finish_manifest(manifest, dir, start);
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const auto table = ssl::sweep_accuracy(grid_from_config(cfg, args.method), data, cfg.threads);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("sweep", args, cfg);
  manifest["method"] = args.method;
  write_output(manifest, dir, "heatmap.csv", ssl::heatmap_csv(table));
  finish_manifest(manifest, dir, start);
  return 0;
}

int cmd_success_prob(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const ssl::SweepGrid grid = grid_from_config(cfg, args.method);
  grid.validate();

  std::string out_csv = "alpha,eps_over_tau2,tau2,gamma,success,trials,estimate,stderr\n";
  for (double alpha : grid.alpha_values) {
    for (std::size_t ei = 0; ei < grid.eps_over_tau2_values.size(); ++ei) {
      const double e = grid.eps_over_tau2_values[ei];
      const double tau = grid.tau_for(ei);
      const auto est =
          ssl::success_probability(grid, alpha, e, tau, data, cfg.trials, cfg.seed, cfg.threads);
      out_csv += ssl::csv::join_row(
          {ssl::csv::format_double(alpha), ssl::csv::format_double(e),
           ssl::csv::format_double(tau * tau), ssl::csv::format_double(cfg.gamma),
           std::to_string(est.success_count), std::to_string(est.trials),
           ssl::csv::format_double(est.estimate), ssl::csv::format_double(est.standard_error)});
    }
  }
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("success-prob", args, cfg);
  manifest["method"] = args.method;
  manifest["trials"] = cfg.trials;
  write_output(manifest, dir, "success.csv", out_csv);
  finish_manifest(manifest, dir, start);
  return 0;
}

int cmd_balance(const CommonArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const ssl::RunConfig cfg = load_config(args);
  const ssl::SyntheticData data = load_dataset(cfg);
  const auto table = ssl::balance_study(cfg.labels_per_cluster,
                                        grid_from_config(cfg, args.method), data, cfg.threads);
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  json manifest = manifest_base("balance", args, cfg);
  manifest["method"] = args.method;
  manifest["labels_per_cluster"] = cfg.labels_per_cluster;
  write_output(manifest, dir, "balance.csv", ssl::heatmap_csv(table));
  finish_manifest(manifest, dir, start);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based semi-supervised classification lab"};
  app.require_subcommand(1);

  CommonArgs gen_args, spec_args, probit_args, onehot_args, sweep_args, succ_args, bal_args;
  add_common(app.add_subcommand("gen-data", "generate the synthetic dataset"), gen_args);
  add_common(app.add_subcommand("spectrum", "spectral perturbation diagnostics"), spec_args);
  add_common(app.add_subcommand("probit", "single binary solve"), probit_args);
  add_common(app.add_subcommand("onehot", "single multi-class solve"), onehot_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy heat map over (alpha, eps/tau^2)");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--method", sweep_args.method, "probit | onehot");
  auto* succ_cmd = app.add_subcommand("success-prob", "Monte-Carlo success probability");
  add_common(succ_cmd, succ_args);
  succ_cmd->add_option("--method", succ_args.method, "probit | onehot");
  auto* bal_cmd = app.add_subcommand("balance", "observation-balance study");
  add_common(bal_cmd, bal_args);
  bal_cmd->add_option("--method", bal_args.method, "probit | onehot");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("gen-data")) return cmd_gen_data(gen_args);
    if (app.got_subcommand("spectrum")) return cmd_spectrum(spec_args);
    if (app.got_subcommand("probit")) return cmd_probit(probit_args);
    if (app.got_subcommand("onehot")) return cmd_onehot(onehot_args);
    if (app.got_subcommand("sweep")) return cmd_sweep(sweep_args);
    if (app.got_subcommand("success-prob")) return cmd_success_prob(succ_args);
    if (app.got_subcommand("balance")) return cmd_balance(bal_args);
  } catch (const ssl::ContractViolation& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverError;
  }
  return 0;
}
