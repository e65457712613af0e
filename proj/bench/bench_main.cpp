// Timing comparison between the serial reference kernels and their OpenMP
// counterparts: weight-matrix assembly and a probit accuracy sweep.

#include <chrono>
#include <cstdio>

#include "ssl/experiments.hpp"
#include "ssl/graph.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

template <typename Fn>
double time_s(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("threads available: %d\n\n", threads);

  {
    ssl::SyntheticSpec spec = ssl::SyntheticSpec::three_gaussians(7);
    spec.per_cluster = {400, 400, 400};
    const ssl::SyntheticData data = ssl::generate_mixture(spec);
    const ssl::KernelSpec kernel = ssl::KernelSpec::perturbed_threshold(0.25, 0.01);
    volatile double sink = 0;
    const double serial = time_s([&] {
      for (int rep = 0; rep < 5; ++rep)
        sink = ssl::serial::build_weight_matrix(data.cloud, kernel).degrees.sum();
    });
    const double parallel = time_s([&] {
      for (int rep = 0; rep < 5; ++rep)
        sink = ssl::build_weight_matrix(data.cloud, kernel).degrees.sum();
    });
    std::printf("weight matrix, N=1200, 5 reps:  serial %.3fs  openmp %.3fs  speedup %.2fx\n",
                serial, parallel, serial / parallel);
    (void)sink;
  }

  {
    const ssl::SyntheticData data = ssl::generate_mixture(ssl::SyntheticSpec::three_gaussians(7));
    ssl::SweepGrid grid;
    grid.alpha_values = {0.5, 1, 2, 4, 6, 8};
    grid.eps_over_tau2_values = {0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    const double serial = time_s([&] { ssl::sweep_accuracy(grid, data, 1); });
    const double parallel = time_s([&] { ssl::sweep_accuracy(grid, data, 0); });
    std::printf("probit sweep, 48 cells:         serial %.3fs  openmp %.3fs  speedup %.2fx\n",
                serial, parallel, serial / parallel);
  }

  {
    const ssl::SyntheticData data = ssl::generate_mixture(ssl::SyntheticSpec::three_gaussians(7));
    ssl::SweepGrid grid;
    grid.alpha_values = {2};
    grid.eps_over_tau2_values = {0.1};
    grid.gamma = 0.3;
    const double serial =
        time_s([&] { ssl::success_probability(grid, 2, 0.1, 0.5, data, 100, 11, 1); });
    const double parallel =
        time_s([&] { ssl::success_probability(grid, 2, 0.1, 0.5, data, 100, 11, 0); });
    std::printf("success prob, 100 trials:       serial %.3fs  openmp %.3fs  speedup %.2fx\n",
                serial, parallel, serial / parallel);
  }
  return 0;
}
