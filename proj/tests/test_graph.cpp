#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ssl/errors.hpp"
#include "ssl/graph.hpp"
#include "ssl/point_cloud.hpp"
#include "test_util.hpp"

using namespace ssl;

TEST_CASE("kernel_eval hard threshold") {
  const KernelSpec hard = KernelSpec::hard_threshold(0.25);
  CHECK(kernel_eval(hard, 0.1) == 1.0);
  CHECK(kernel_eval(hard, 0.25) == 1.0);  // boundary included
  CHECK(kernel_eval(hard, 0.3) == 0.0);
  CHECK_THROWS_AS(kernel_eval(hard, -0.1), ContractViolation);
}

TEST_CASE("kernel_eval perturbed threshold") {
  const KernelSpec base = KernelSpec::hard_threshold(0.25);
  const KernelSpec zero_eps = KernelSpec::perturbed_threshold(0.25, 0.0);
  for (double t : {0.0, 0.1, 0.25, 0.3, 1.0, 5.0})
    CHECK(kernel_eval(zero_eps, t) == kernel_eval(base, t));

  // Direct scalar evaluation of kappa(0.5) + 0.1 exp(-0.25/0.35^2).
  const KernelSpec pert = KernelSpec::perturbed_threshold(0.25, 0.1);
  const double expected = 0.1 * std::exp(-0.25 / (0.35 * 0.35));
  CHECK(kernel_eval(pert, 0.5) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.01299).epsilon(1e-3));
}

TEST_CASE("kernel_eval exponential and validation") {
  const KernelSpec expo = KernelSpec::exponential(0.5);
  CHECK(kernel_eval(expo, 0.0) == 1.0);
  CHECK(kernel_eval(expo, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(KernelSpec::hard_threshold(0.0), ContractViolation);
  CHECK_THROWS_AS(KernelSpec::perturbed_threshold(0.25, -0.5), ContractViolation);
  CHECK_THROWS_AS(KernelSpec::exponential(-1.0), ContractViolation);
}

TEST_CASE("build_weight_matrix basics") {
  PointCloud two;
  two.points.resize(2, 2);
  two.points << 0.0, 0.0, 0.1, 0.0;
  const WeightedGraph g = build_weight_matrix(two, KernelSpec::hard_threshold(0.25));
  CHECK(g.weights(0, 1) == 1.0);
  CHECK(g.weights(1, 0) == 1.0);
  CHECK(g.weights(0, 0) == 0.0);
  CHECK(g.weights(1, 1) == 0.0);
  CHECK(g.degrees(0) == 1.0);

  // Zero diagonal even when kappa(0) > 0.
  const WeightedGraph expo = build_weight_matrix(two, KernelSpec::exponential(1.0));
  CHECK(expo.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("weight matrix is bit-exactly symmetric and matches serial") {
  const PointCloud cloud = ssl_test::random_cloud(60, 3, 42);
  const KernelSpec kernel = KernelSpec::perturbed_threshold(0.3, 0.05);
  const WeightedGraph par = build_weight_matrix(cloud, kernel);
  const WeightedGraph ser = serial::build_weight_matrix(cloud, kernel);
  CHECK((par.weights - par.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((par.weights - ser.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK((par.degrees - ser.degrees).cwiseAbs().maxCoeff() == 0.0);
  CHECK(par.weights.minCoeff() >= 0.0);
}

TEST_CASE("build_laplacian hand example and null vector") {
  WeightedGraph g;
  g.weights.resize(2, 2);
  g.weights << 0, 1, 1, 0;
  g.degrees = g.weights.rowwise().sum();

  const GraphLaplacian l0 = build_laplacian(g, 0.0);
  CHECK(l0.matrix(0, 0) == 1.0);
  CHECK(l0.matrix(0, 1) == -1.0);
  CHECK(l0.matrix(1, 0) == -1.0);
  CHECK(l0.matrix(1, 1) == 1.0);

  // D = I here, so any p gives the same matrix.
  const GraphLaplacian lhalf = build_laplacian(g, 0.5);
  CHECK((lhalf.matrix - l0.matrix).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("laplacian annihilates D^p 1 and is PSD") {
  for (double p : {0.0, 0.5, 1.0}) {
    const WeightedGraph g = ssl_test::random_graph(40, 7);
    const GraphLaplacian lap = build_laplacian(g, p);
    const double norm = lap.matrix.norm();
    CHECK((lap.matrix * lap.null_vector()).norm() <= 1e-12 * norm * lap.null_vector().norm());
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x(g.n());
      for (int i = 0; i < g.n(); ++i) x(i) = ssl_test::uniform(900 + trial, i, -1, 1);
      x.normalize();
      CHECK(x.dot(lap.matrix * x) >= -1e-10 * norm);
    }
  }
}

TEST_CASE("laplacian quadratic form identity") {
  for (double p : {0.0, 0.5}) {
    const WeightedGraph g = ssl_test::random_graph(30, 11);
    const GraphLaplacian lap = build_laplacian(g, p);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(g.n());
      for (int i = 0; i < g.n(); ++i) x(i) = ssl_test::uniform(300 + trial, i, -2, 2);
      double direct = 0;
      for (int i = 0; i < g.n(); ++i)
        for (int j = 0; j < g.n(); ++j) {
          const double diff = x(i) / std::pow(g.degrees(i), p) - x(j) / std::pow(g.degrees(j), p);
          direct += 0.5 * g.weights(i, j) * diff * diff;
        }
      const double via_matrix = x.dot(lap.matrix * x);
      CHECK(via_matrix == doctest::Approx(direct).epsilon(1e-10));
    }
  }
}

TEST_CASE("build_laplacian rejects zero-degree nodes") {
  WeightedGraph g;
  g.weights = Eigen::MatrixXd::Zero(3, 3);
  g.weights(0, 1) = g.weights(1, 0) = 1.0;
  g.degrees = g.weights.rowwise().sum();
  CHECK_THROWS_AS(build_laplacian(g, 0.0), OutlierNodeError);
  try {
    build_laplacian(g, 0.0);
  } catch (const OutlierNodeError& e) {
    CHECK(e.node() == 2);
  }
}

TEST_CASE("connected_components block structure") {
  WeightedGraph g;
  g.weights = Eigen::MatrixXd::Zero(5, 5);
  // Block {0,1,2} and block {3,4}.
  g.weights(0, 1) = g.weights(1, 0) = 1;
  g.weights(1, 2) = g.weights(2, 1) = 1;
  g.weights(3, 4) = g.weights(4, 3) = 1;
  g.degrees = g.weights.rowwise().sum();

  const ClusterPartition part = connected_components(g);
  CHECK(part.k == 2);
  CHECK(part.members[0] == std::vector<int>{0, 1, 2});
  CHECK(part.members[1] == std::vector<int>{3, 4});
  for (int i = 0; i < 5; ++i) CHECK(part.assignment[i] == (i < 3 ? 1 : 2));
}

TEST_CASE("connected_components complete graph and threshold") {
  const WeightedGraph g = ssl_test::random_graph(20, 5);
  CHECK(connected_components(g).k == 1);
  // A threshold above every weight isolates every node.
  const double wmax = g.weights.maxCoeff();
  CHECK(connected_components(g, wmax).k == 20);
}

TEST_CASE("perturbed kernel connects the three-Gaussian cloud") {
  const ssl::SyntheticData data = ssl_test::three_cluster_data();
  const WeightedGraph g =
      build_weight_matrix(data.cloud, KernelSpec::perturbed_threshold(0.25, 0.01));
  CHECK(connected_components(g).k == 1);
}

TEST_CASE("weighted_indicators") {
  WeightedGraph g;
  g.weights = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g.weights(i, j) = g.weights(j, i) = 1.0;
  g.weights(4, 5) = g.weights(5, 4) = 1.0;
  g.degrees = g.weights.rowwise().sum();
  const ClusterPartition part = connected_components(g);
  REQUIRE(part.k == 2);

  SUBCASE("p = 0 normalized plain indicator") {
    const auto chis = weighted_indicators(part, g, 0.0);
    for (int j = 0; j < 4; ++j) CHECK(chis[0](j) == doctest::Approx(0.5));
    CHECK(chis[0](4) == 0.0);
    CHECK(chis[0](5) == 0.0);
  }
  SUBCASE("orthonormal family") {
    const auto chis = weighted_indicators(part, g, 1.0);
    for (std::size_t a = 0; a < chis.size(); ++a)
      for (std::size_t b = 0; b < chis.size(); ++b)
        CHECK(chis[a].dot(chis[b]) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-14));
  }
}

TEST_CASE("weighted_indicators path graph with p = 1") {
  WeightedGraph g;
  g.weights = Eigen::MatrixXd::Zero(3, 3);
  g.weights(0, 1) = g.weights(1, 0) = 1.0;
  g.weights(1, 2) = g.weights(2, 1) = 1.0;
  g.degrees = g.weights.rowwise().sum();
  const ClusterPartition part = connected_components(g);
  REQUIRE(part.k == 1);
  const auto chis = weighted_indicators(part, g, 1.0);
  const double s6 = std::sqrt(6.0);
  CHECK(chis[0](0) == doctest::Approx(1.0 / s6));
  CHECK(chis[0](1) == doctest::Approx(2.0 / s6));
  CHECK(chis[0](2) == doctest::Approx(1.0 / s6));
}

TEST_CASE("indicators lie in the null space of the disconnected Laplacian") {
  const ssl::SyntheticData data = ssl_test::three_cluster_data();
  const WeightedGraph g = build_weight_matrix(data.cloud, KernelSpec::hard_threshold(0.25));
  const ClusterPartition part = connected_components(g);
  REQUIRE(part.k == 3);
  for (double p : {0.0, 0.5}) {
    const GraphLaplacian lap = build_laplacian(g, p);
    for (const auto& chi : weighted_indicators(part, g, p))
      CHECK((lap.matrix * chi).norm() <= 1e-12 * lap.matrix.norm());
  }
}

TEST_CASE("point cloud CSV and JSON round-trips") {
  const PointCloud cloud = ssl_test::random_cloud(8, 3, 77);
  const auto path = std::filesystem::temp_directory_path() / "ssl_test_points.csv";
  write_point_cloud_csv(cloud, path.string());
  const PointCloud back = read_point_cloud_csv(path.string());
  CHECK((back.points - cloud.points).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);

  const PointCloud jback = point_cloud_from_json_string(point_cloud_to_json_string(cloud));
  CHECK((jback.points - cloud.points).cwiseAbs().maxCoeff() == 0.0);
}
