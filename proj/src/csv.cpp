#include "cgw/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cgw/error.hpp"

namespace cgw {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += fields[i];
  }
  out += '\n';
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::string out;
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
  return out;
}

std::vector<CsvTable> parse_csv(std::string_view text) {
  std::vector<CsvTable> tables;
  bool in_table = false;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) {
      in_table = false;
      continue;
    }
    auto fields = split(line);
    if (!in_table) {
      tables.push_back({std::move(fields), {}});
      in_table = true;
      continue;
    }
    if (fields.size() != tables.back().header.size())
      throw Error(ErrorCode::InvalidInput, "CSV row width differs from header");
    tables.back().rows.push_back(std::move(fields));
  }
  return tables;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace cgw
