#pragma once

#include <Eigen/Dense>
#include <string>

namespace ssl {

// Unlabelled feature vectors x_1..x_N in R^d, one per row.
struct PointCloud {
  Eigen::MatrixXd points;

  int n() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }

  // Throws ContractViolation unless N >= 1, d >= 1 and all coordinates finite.
  void validate() const;
};

PointCloud read_point_cloud_csv(const std::string& path);
void write_point_cloud_csv(const PointCloud& cloud, const std::string& path);

PointCloud point_cloud_from_json_string(const std::string& json_text);
std::string point_cloud_to_json_string(const PointCloud& cloud);

}  // namespace ssl
