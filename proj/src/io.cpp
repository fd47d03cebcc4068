#include "lqed/io.hpp"

#include <fmt/format.h>

#include "lqed/common.hpp"

namespace lqed {

std::string format_number(double v) { return fmt::format("{:.12e}", v); }

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw SchemaError("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw SchemaError("CSV row width does not match header");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (columns.size() != header.size()) throw SchemaError("column count does not match header");
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != n) throw SchemaError("columns differ in length");
  CsvWriter csv(path, header);
  std::vector<double> row(columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) row[j] = columns[j][i];
    csv.row(row);
  }
}

}  // namespace lqed
