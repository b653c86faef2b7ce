#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "survx/dataset.hpp"

using namespace survx;
using testutil::make_dataset;
using testutil::rec;

namespace {

std::filesystem::path temp_csv(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream file(path, std::ios::binary);
  file << content;
  return path;
}

}  // namespace

TEST_CASE("validate_record enforces time and entry ordering") {
  CHECK_NOTHROW(validate_record(rec(5.0, true)));
  CHECK_THROWS_AS(validate_record(rec(0.0, true)), std::invalid_argument);
  CHECK_THROWS_AS(validate_record(rec(-1.0, false)), std::invalid_argument);
  CHECK_THROWS_AS(validate_record(rec(5.0, true, Arm::soc, 5.0)), std::invalid_argument);
  CHECK_THROWS_AS(validate_record(rec(5.0, true, Arm::soc, -0.5)), std::invalid_argument);
  CHECK_NOTHROW(validate_record(rec(5.0, true, Arm::soc, 4.0)));
}

TEST_CASE("load_ipd reads the default layout") {
  const auto path = temp_csv("survx_ipd_ok.csv",
                             "# demo\n"
                             "id,time,event,arm\n"
                             "a,5,1,soc\n"
                             "b,7.5,0,experimental\n");
  const Dataset data = load_ipd(path.string());
  REQUIRE(data.size() == 2);
  CHECK(data.records[0].id == "a");
  CHECK(data.records[0].event);
  CHECK(data.records[1].arm == Arm::experimental);
  CHECK_FALSE(data.records[1].event);
  CHECK(data.event_count() == 1);
  CHECK(data.max_time() == 7.5);
  std::filesystem::remove(path);
}

TEST_CASE("load_ipd honours entry_time and reports row errors") {
  const auto with_entry = temp_csv("survx_ipd_entry.csv",
                                   "id,time,event,arm,entry_time\n"
                                   "a,9,1,soc,2\n");
  const Dataset data = load_ipd(with_entry.string());
  CHECK(data.records[0].entry_time == 2.0);
  std::filesystem::remove(with_entry);

  const auto bad_event = temp_csv("survx_ipd_badevent.csv",
                                  "id,time,event,arm\n"
                                  "a,9,yes,soc\n");
  CHECK_THROWS(load_ipd(bad_event.string()));
  std::filesystem::remove(bad_event);

  const auto bad_time = temp_csv("survx_ipd_badtime.csv",
                                 "id,time,event,arm,entry_time\n"
                                 "a,2,1,soc,3\n");
  CHECK_THROWS(load_ipd(bad_time.string()));
  std::filesystem::remove(bad_time);
}

TEST_CASE("write_ipd_csv round-trips through load_ipd") {
  Dataset data = make_dataset({{4.0, true}, {6.25, false}});
  data.records[1].arm = Arm::experimental;
  data.records[1].source = Source::registry;
  data.records[1].entry_time = 1.5;
  const auto path = std::filesystem::temp_directory_path() / "survx_ipd_roundtrip.csv";
  write_ipd_csv(path.string(), data, "roundtrip check");
  const Dataset back = load_ipd(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back.records[0].time == 4.0);
  CHECK(back.records[1].entry_time == 1.5);
  CHECK(back.records[1].arm == Arm::experimental);
  CHECK(back.records[1].source == Source::registry);
  std::filesystem::remove(path);
}

TEST_CASE("filter_arm keeps only the requested arm") {
  Dataset data = make_dataset({{1.0, true}, {2.0, true}});
  data.records[1].arm = Arm::experimental;
  CHECK(data.filter_arm(Arm::soc).size() == 1);
  CHECK(data.filter_arm(Arm::experimental).records[0].time == 2.0);
}

TEST_CASE("trim_tail re-censors past the cut by default") {
  // max time 50, fraction 0.1 -> cut at 45; the event at 50 becomes a censor at 45
  const Dataset data = make_dataset({{10, true}, {20, true}, {40, false}, {50, true}});
  const Dataset trimmed = trim_tail(data, 0.1);
  REQUIRE(trimmed.size() == 4);
  CHECK(trimmed.records[3].time == 45.0);
  CHECK_FALSE(trimmed.records[3].event);
  CHECK(trimmed.records[2].time == 40.0);
  CHECK_FALSE(trimmed.records[2].event);
  CHECK(trimmed.records[0].event);
}

TEST_CASE("trim_tail drop mode removes late records") {
  const Dataset data = make_dataset({{10, true}, {20, true}, {40, false}, {50, true}});
  const Dataset trimmed = trim_tail(data, 0.1, TrimMode::drop);
  REQUIRE(trimmed.size() == 3);
  CHECK(trimmed.records.back().time == 40.0);
}

TEST_CASE("trim_tail half of a single-event dataset") {
  const Dataset data = make_dataset({{48, true}});
  const Dataset trimmed = trim_tail(data, 0.5);
  REQUIRE(trimmed.size() == 1);
  CHECK(trimmed.records[0].time == 24.0);
  CHECK_FALSE(trimmed.records[0].event);
}

TEST_CASE("trim_tail validates the fraction and fraction 0 is the identity") {
  const Dataset data = make_dataset({{10, true}});
  CHECK_THROWS_AS(trim_tail(data, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(trim_tail(data, -0.1), std::invalid_argument);
  const Dataset untouched = trim_tail(data, 0.0);
  CHECK(untouched.records[0].time == 10.0);
  CHECK(untouched.records[0].event);
}

TEST_CASE("trim_at is idempotent at a fixed cut") {
  const Dataset data = make_dataset({{10, true}, {30, true}, {50, false}});
  const Dataset once = trim_at(data, 25.0);
  const Dataset twice = trim_at(once, 25.0);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once.records[i].time == twice.records[i].time);
    CHECK(once.records[i].event == twice.records[i].event);
  }
  CHECK(once.records[1].time == 25.0);
  CHECK_FALSE(once.records[1].event);
}

TEST_CASE("trim removes subjects entering after the cut") {
  Dataset data = make_dataset({{10, true}, {30, true}});
  data.records[1].entry_time = 26.0;
  const Dataset trimmed = trim_at(data, 25.0);
  REQUIRE(trimmed.size() == 1);
  CHECK(trimmed.records[0].time == 10.0);
}

TEST_CASE("blend keeps the trial and splices late registry follow-up") {
  const Dataset rct = make_dataset({{40, true}});
  Dataset registry = make_dataset({{30, true}, {90, true}});
  for (auto& r : registry.records) r.source = Source::registry;
  const Dataset blended = blend(rct, registry, 43.2);
  REQUIRE(blended.size() == 2);
  CHECK(blended.records[0].time == 40.0);
  CHECK(blended.records[0].source == Source::rct);
  CHECK(blended.records[1].time == 90.0);
  CHECK(blended.records[1].source == Source::registry);
  CHECK(blended.records[1].entry_time == 43.2);
}

TEST_CASE("blend respects registry entry times beyond the join") {
  const Dataset rct = make_dataset({{40, true}});
  Dataset registry = make_dataset({{90, true}});
  registry.records[0].entry_time = 60.0;
  const Dataset blended = blend(rct, registry, 43.2);
  REQUIRE(blended.size() == 2);
  CHECK(blended.records[1].entry_time == 60.0);
}

TEST_CASE("arm and source labels round-trip through their parsers") {
  CHECK(parse_arm(to_string(Arm::soc)) == Arm::soc);
  CHECK(parse_arm(to_string(Arm::experimental)) == Arm::experimental);
  CHECK(parse_source(to_string(Source::reconstructed)) == Source::reconstructed);
  CHECK_THROWS(parse_arm("sOc-ish"));
}
