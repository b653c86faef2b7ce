#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "survx/km.hpp"
#include "survx/reconstruct.hpp"

using namespace survx;
using testutil::make_dataset;

TEST_CASE("make_digitized_curve canonicalizes the origin and validates shape") {
  const DigitizedCurve curve = make_digitized_curve({2.0, 5.0}, {0.8, 0.5});
  REQUIRE(curve.times.size() == 3);
  CHECK(curve.times[0] == 0.0);
  CHECK(curve.survival[0] == 1.0);
  CHECK_THROWS(make_digitized_curve({2.0, 1.0}, {0.8, 0.5}));          // times decrease
  CHECK_THROWS(make_digitized_curve({1.0, 2.0}, {0.5, 0.8}));          // survival rises
  CHECK_THROWS(make_digitized_curve({1.0}, {1.5}));                    // out of range
  CHECK_THROWS(make_digitized_curve({0.0, 1.0}, {0.9, 0.5}));          // S(0) != 1
}

TEST_CASE("validate_risk_table rejects rising counts and unsorted times") {
  RiskTable bad;
  bad.times = {0.0, 6.0};
  bad.n_risk = {10, 12};
  CHECK_THROWS(validate_risk_table(bad));
  bad.times = {6.0, 0.0};
  bad.n_risk = {12, 10};
  CHECK_THROWS(validate_risk_table(bad));
}

TEST_CASE("reconstruct_ipd inverts a fully tabulated product-limit curve") {
  // source data: events at 1, 2, 3; censored at 2 and 4 (n = 5)
  const Dataset source =
      make_dataset({{1, true}, {2, true}, {2, false}, {3, true}, {4, false}});
  const SurvivalCurve km = kaplan_meier(source);
  const DigitizedCurve curve = testutil::curve_from_km(km);
  const RiskTable risk = testutil::risk_table_at(source, {0.0, 1.0, 2.0, 3.0});
  REQUIRE(risk.n_risk == std::vector<int>{5, 5, 4, 2});

  const Dataset rebuilt = reconstruct_ipd(curve, risk);
  CHECK(rebuilt.size() == 5);
  CHECK(rebuilt.event_count() == 3);
  const SurvivalCurve km2 = kaplan_meier(rebuilt);
  REQUIRE(km2.times == km.times);
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    CHECK(km2.survival[i] == km.survival[i]);  // bit-identical running product
    CHECK(km2.at_risk[i] == km.at_risk[i]);
    CHECK(km2.events[i] == km.events[i]);
  }
  for (const SubjectRecord& rec : rebuilt.records) {
    CHECK(rec.source == Source::reconstructed);
  }
}

TEST_CASE("reconstruct_ipd with sparse tables stays within the snap tolerance") {
  const Dataset source = testutil::weibull_ipd(120, 2024, 0.04, 1.2, 30.0, 0.01);
  const SurvivalCurve km = kaplan_meier(source);
  const DigitizedCurve curve = testutil::curve_from_km(km);
  const RiskTable risk = testutil::risk_table_at(source, {0.0, 6.0, 12.0, 18.0, 24.0, 30.0});

  const Dataset rebuilt = reconstruct_ipd(curve, risk);
  const SurvivalCurve km2 = kaplan_meier(rebuilt);
  // at-risk counts at table rows are pinned exactly
  for (std::size_t i = 0; i < risk.times.size(); ++i) {
    int at_risk = 0;
    for (const SubjectRecord& rec : rebuilt.records) {
      if (rec.time >= risk.times[i]) ++at_risk;
    }
    CHECK(at_risk == risk.n_risk[i]);
  }
  // survival at every curve point within half a subject of the target
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    if (km.events[i] == 0) continue;
    const double rebuilt_s = curve_survival_at(km2, km.times[i]);
    CHECK(std::abs(rebuilt_s - km.survival[i]) < 0.5 / 5.0);  // generous cap
  }
}

TEST_CASE("reconstruct_ipd matches a reported total event count") {
  // censoring beyond the last table row hides events; the reported total
  // forces extra censors to be inferred
  const Dataset source = testutil::weibull_ipd(80, 515, 0.03, 1.1, 28.0, 0.02);
  const SurvivalCurve km = kaplan_meier(source);
  const DigitizedCurve curve = testutil::curve_from_km(km);
  RiskTable risk = testutil::risk_table_at(source, {0.0, 10.0, 20.0});
  risk.total_events = static_cast<long>(source.event_count());

  const Dataset rebuilt = reconstruct_ipd(curve, risk);
  CHECK(rebuilt.event_count() == source.event_count());
  CHECK(rebuilt.size() == risk.n_risk[0]);
}

TEST_CASE("reconstruct_ipd rejects a drop the table contradicts") {
  // the table says all 10 subjects are still at risk at t=10, yet the curve
  // drops at t=5: no integer event count can satisfy both
  const DigitizedCurve curve = make_digitized_curve({5.0}, {0.9});
  RiskTable risk;
  risk.times = {0.0, 10.0};
  risk.n_risk = {10, 10};
  CHECK_THROWS_WITH_AS(reconstruct_ipd(curve, risk), doctest::Contains("at-risk"),
                       std::runtime_error);
}

TEST_CASE("reconstruct_ipd rejects a curve that drops at time zero") {
  std::vector<double> times{0.0, 0.0};
  std::vector<double> survival{1.0, 0.9};
  CHECK_THROWS(reconstruct_ipd(make_digitized_curve(std::move(times), std::move(survival)),
                               testutil::risk_table_at(make_dataset({{1, true}}), {0.0})));
}

TEST_CASE("reconstruct_ipd handles an all-censored flat curve") {
  DigitizedCurve curve;
  curve.times = {0.0, 12.0};
  curve.survival = {1.0, 1.0};
  RiskTable risk;
  risk.times = {0.0, 12.0};
  risk.n_risk = {8, 3};
  const Dataset rebuilt = reconstruct_ipd(curve, risk);
  CHECK(rebuilt.size() == 8);
  CHECK(rebuilt.event_count() == 0);
  int at_risk_12 = 0;
  for (const SubjectRecord& rec : rebuilt.records) {
    CHECK_FALSE(rec.event);
    if (rec.time >= 12.0) ++at_risk_12;
  }
  CHECK(at_risk_12 == 3);
}

TEST_CASE("reconstruction CSV readers parse the published formats") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto curve_path = dir / "survx_curve_in.csv";
  {
    std::ofstream file(curve_path);
    file << "# digitized\ntime,survival\n0,1\n3.5,0.82\n9,0.6\n";
  }
  const DigitizedCurve curve = read_digitized_curve_csv(curve_path.string());
  REQUIRE(curve.times.size() == 3);
  CHECK(curve.survival[1] == 0.82);

  const auto risk_path = dir / "survx_risk_in.csv";
  {
    std::ofstream file(risk_path);
    file << "time,n_risk\n0,50\n6,38\ntotal_events,21\n";
  }
  const RiskTable risk = read_risk_table_csv(risk_path.string());
  REQUIRE(risk.times.size() == 2);
  CHECK(risk.n_risk[1] == 38);
  REQUIRE(risk.total_events.has_value());
  CHECK(*risk.total_events == 21);
  std::filesystem::remove(curve_path);
  std::filesystem::remove(risk_path);
}

TEST_CASE("lifetable_to_ipd expands intervals and reproduces the table") {
  const Dataset source = make_dataset(
      {{0.5, true}, {1.5, true}, {1.7, false}, {2.5, true}, {3.2, false}, {3.7, true}});
  const LifeTable table = life_table(source, 1.0);
  const Dataset expanded = lifetable_to_ipd(table);
  CHECK(expanded.size() == source.size());
  CHECK(expanded.event_count() == source.event_count());
  const LifeTable again = life_table(expanded, 1.0);
  CHECK(again.n_risk == table.n_risk);
  CHECK(again.n_events == table.n_events);
  CHECK(again.n_censored == table.n_censored);
  for (const SubjectRecord& rec : expanded.records) {
    CHECK(rec.source == Source::reconstructed);
  }
}

TEST_CASE("lifetable_to_ipd censors leftovers at the table end") {
  LifeTable table;
  table.interval_starts = {0.0, 6.0};
  table.n_risk = {10, 7};
  table.n_events = {2, 1};
  table.n_censored = {1, 2};
  table.survival = {0.8, 0.6857142857142857};
  table.interval_width = 6.0;
  const Dataset expanded = lifetable_to_ipd(table, Source::registry, Arm::experimental);
  CHECK(expanded.size() == 10);
  CHECK(expanded.event_count() == 3);
  int at_end = 0;
  for (const SubjectRecord& rec : expanded.records) {
    CHECK(rec.arm == Arm::experimental);
    CHECK(rec.source == Source::registry);
    if (rec.time == 12.0) {
      CHECK_FALSE(rec.event);
      ++at_end;
    }
  }
  CHECK(at_end == 4);  // 10 - 3 events - 3 interval censorings
}

TEST_CASE("lifetable_to_ipd validates the chaining of counts") {
  LifeTable table;
  table.interval_starts = {0.0, 6.0};
  table.n_risk = {10, 9};  // 10 - 2 - 1 = 7, not 9
  table.n_events = {2, 1};
  table.n_censored = {1, 0};
  table.survival = {0.8, 0.7};
  table.interval_width = 6.0;
  CHECK_THROWS_WITH_AS(lifetable_to_ipd(table), doctest::Contains("interval"),
                       std::invalid_argument);
}
