#include "survx/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace survx {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& origin) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trimmed(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    auto cells = split_csv_line(line);
    for (auto& c : cells) c = trimmed(c);
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) {
        throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(table.header.size()) + " columns, got " +
                                 std::to_string(cells.size()));
      }
      table.rows.push_back(std::move(cells));
      table.line_numbers.push_back(line_no);
    }
  }
  if (!have_header) throw std::runtime_error(origin + ": empty file, expected a CSV header");
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return parse_csv(in, path);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("failed to format a double");
  return std::string(buf, ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trimmed(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::runtime_error(context + ": expected a number, got '" + text + "'");
  }
  return value;
}

long parse_long(const std::string& text, const std::string& context) {
  const std::string t = trimmed(text);
  long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::runtime_error(context + ": expected an integer, got '" + text + "'");
  }
  return value;
}

}  // namespace survx
