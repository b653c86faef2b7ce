#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace survx {

/// Minimal comma-separated table: a header row plus string cells. Lines
/// beginning with '#' are treated as comments and skipped; the 1-based source
/// line of each row is kept so parse errors can name the offending row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& origin);

std::vector<std::string> split_csv_line(const std::string& line);

/// Shortest decimal form that round-trips the double; locale-independent,
/// so repeated runs emit byte-identical files.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

}  // namespace survx
