#pragma once

#include <string>
#include <vector>

namespace ssl::csv {

// Shortest decimal form that round-trips the double; byte-stable across runs.
std::string format_double(double v);

std::string join_row(const std::vector<std::string>& cells);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace ssl::csv
