#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "survx/csv.hpp"

using namespace survx;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream file(path, std::ios::binary);
  file << content;
  return path;
}

CsvTable parse_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  return parse_csv(in, origin);
}

}  // namespace

TEST_CASE("parse_csv splits rows and skips comments and blanks") {
  const CsvTable table = parse_text("# header comment\n"
                                    "a,b,c\n"
                                    "\n"
                                    "1,2,3\n"
                                    "# mid comment\n"
                                    "4,5,6\n",
                                    "mem");
  CHECK(table.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0] == std::vector<std::string>{"1", "2", "3"});
  CHECK(table.rows[1] == std::vector<std::string>{"4", "5", "6"});
  CHECK(table.column("b").value() == 1);
  CHECK_FALSE(table.column("missing").has_value());
}

TEST_CASE("parse_csv rejects ragged rows") {
  CHECK_THROWS_WITH_AS(parse_text("a,b\n1\n", "mem"), doctest::Contains("mem"),
                       std::runtime_error);
}

TEST_CASE("read_csv reports a missing file") {
  CHECK_THROWS_AS(read_csv("/nonexistent/definitely_missing.csv"), std::runtime_error);
}

TEST_CASE("read_csv round-trips a file") {
  const auto path = temp_file("survx_csv_roundtrip.csv", "x,y\n0.5,1\n");
  const CsvTable table = read_csv(path.string());
  CHECK(table.rows.size() == 1);
  CHECK(table.line_numbers[0] == 2);
  std::filesystem::remove(path);
}

TEST_CASE("format_double is shortest round-trip") {
  for (double x : {0.1, 1.0 / 3.0, 9.992534141916233, 1e-17, -2.5, 0.0, 123456.75}) {
    const std::string text = format_double(x);
    CHECK(parse_double(text, "roundtrip") == x);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("parse_double and parse_long name their context on bad input") {
  CHECK_THROWS_WITH_AS(parse_double("abc", "field x"), doctest::Contains("field x"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_long("1.5x", "count"), doctest::Contains("count"),
                       std::runtime_error);
  CHECK(parse_double("2.5e-1", "ok") == 0.25);
  CHECK(parse_long("42", "ok") == 42);
}
