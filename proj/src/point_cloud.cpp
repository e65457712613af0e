#include "ssl/point_cloud.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "ssl/csv.hpp"
#include "ssl/errors.hpp"

namespace ssl {

void PointCloud::validate() const {
  if (points.rows() < 1 || points.cols() < 1)
    throw ContractViolation("point cloud must have N >= 1 and d >= 1");
  if (!points.allFinite()) throw ContractViolation("point cloud has non-finite coordinates");
}

PointCloud read_point_cloud_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open point cloud file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("ragged rows in point cloud file: " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty point cloud file: " + path);
  PointCloud cloud;
  cloud.points.resize(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < cloud.points.rows(); ++i)
    for (int j = 0; j < cloud.points.cols(); ++j) cloud.points(i, j) = rows[i][j];
  cloud.validate();
  return cloud;
}

void write_point_cloud_csv(const PointCloud& cloud, const std::string& path) {
  std::string out;
  for (int i = 0; i < cloud.points.rows(); ++i) {
    std::vector<std::string> cells;
    cells.reserve(cloud.points.cols());
    for (int j = 0; j < cloud.points.cols(); ++j)
      cells.push_back(csv::format_double(cloud.points(i, j)));
    out += csv::join_row(cells);
  }
  csv::write_file(path, out);
}

PointCloud point_cloud_from_json_string(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_array() || j.empty()) throw ContractViolation("point cloud JSON must be a non-empty array");
  PointCloud cloud;
  const auto& first = j.front();
  cloud.points.resize(static_cast<int>(j.size()), static_cast<int>(first.size()));
  for (int i = 0; i < cloud.points.rows(); ++i) {
    const auto& row = j[i];
    if (static_cast<int>(row.size()) != cloud.points.cols())
      throw ContractViolation("ragged rows in point cloud JSON");
    for (int c = 0; c < cloud.points.cols(); ++c) cloud.points(i, c) = row[c].get<double>();
  }
  cloud.validate();
  return cloud;
}

std::string point_cloud_to_json_string(const PointCloud& cloud) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < cloud.points.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < cloud.points.cols(); ++c) row.push_back(cloud.points(i, c));
    j.push_back(std::move(row));
  }
  return j.dump();
}

}  // namespace ssl
