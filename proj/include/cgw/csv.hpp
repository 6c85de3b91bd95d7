#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cgw {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvTable&) const = default;
};

/// Unquoted comma-separated text; fields never contain commas or newlines.
std::string to_csv(const CsvTable& table);

/// Parses one or more tables separated by blank lines. Throws InvalidInput
/// when a row's width differs from its header.
std::vector<CsvTable> parse_csv(std::string_view text);

/// 9 significant digits; "inf", "-inf" and "nan" for non-finite values.
std::string format_real(double x);

}  // namespace cgw
