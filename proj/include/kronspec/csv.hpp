#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kronspec {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Writes `header` followed by one row per index; every column must have the
// same length.
void write_columns_csv(std::ostream& out, std::string_view header,
                       std::span<const std::vector<double>> columns);

// Reads a numeric CSV with a single header line. Returns the header and the
// columns; throws std::invalid_argument on ragged or non-numeric rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};
CsvTable read_columns_csv(std::istream& in);

}  // namespace kronspec
