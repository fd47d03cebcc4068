#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace lqed {

// Comma-separated, header row, %.12e numerics, UNIX newlines.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

 private:
  std::ofstream out_;
  std::size_t width_;
};

std::string format_number(double v);

// Writes columns of equal length under the given header.
void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);

}  // namespace lqed
