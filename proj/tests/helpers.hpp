#pragma once

// Shared generators for the test suite. Everything here is deterministic in
// the seed so failures reproduce exactly.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "survx/dataset.hpp"
#include "survx/km.hpp"
#include "survx/numerics.hpp"
#include "survx/reconstruct.hpp"
#include "survx/types.hpp"

namespace testutil {

inline survx::SubjectRecord rec(double time, bool event, survx::Arm arm = survx::Arm::soc,
                                double entry = 0.0) {
  survx::SubjectRecord r;
  r.id = "t";
  r.time = time;
  r.event = event;
  r.arm = arm;
  r.entry_time = entry;
  return r;
}

inline survx::Dataset make_dataset(const std::vector<std::pair<double, bool>>& points) {
  survx::Dataset data;
  int i = 0;
  for (const auto& [time, event] : points) {
    survx::SubjectRecord r = rec(time, event);
    r.id = "t-" + std::to_string(++i);
    data.records.push_back(std::move(r));
  }
  return data;
}

/// Weibull event times by inversion with exponential dropout and an
/// administrative cutoff.
inline survx::Dataset weibull_ipd(int n, std::uint64_t seed, double rate = 0.03,
                                  double shape = 1.2, double admin = 40.0,
                                  double dropout_rate = 0.008) {
  survx::Rng rng(seed, 1);
  survx::Dataset data;
  data.label = "synthetic";
  for (int i = 0; i < n; ++i) {
    const double t_event = std::pow(-std::log(rng.uniform()), 1.0 / shape) / rate;
    const double t_drop = -std::log(rng.uniform()) / dropout_rate;
    const double t_cens = std::min(t_drop, admin);
    survx::SubjectRecord r;
    r.id = "w-" + std::to_string(i + 1);
    r.event = t_event <= t_cens;
    r.time = std::max(std::min(t_event, t_cens), 1e-3);
    data.records.push_back(std::move(r));
  }
  return data;
}

inline survx::Dataset exponential_ipd(int n, std::uint64_t seed, double rate = 0.1,
                                      double admin = 25.0) {
  survx::Rng rng(seed, 1);
  survx::Dataset data;
  data.label = "synthetic";
  for (int i = 0; i < n; ++i) {
    const double t_event = -std::log(rng.uniform()) / rate;
    survx::SubjectRecord r;
    r.id = "e-" + std::to_string(i + 1);
    r.event = t_event <= admin;
    r.time = std::max(std::min(t_event, admin), 1e-6);
    data.records.push_back(std::move(r));
  }
  return data;
}

/// The drop points of a product-limit curve, as read off a figure.
inline survx::DigitizedCurve curve_from_km(const survx::SurvivalCurve& km) {
  std::vector<double> times, survival;
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    if (km.events[i] > 0) {
      times.push_back(km.times[i]);
      survival.push_back(km.survival[i]);
    }
  }
  return survx::make_digitized_curve(std::move(times), std::move(survival));
}

/// Numbers at risk just before each requested time (entry_time honoured).
inline survx::RiskTable risk_table_at(const survx::Dataset& data,
                                      const std::vector<double>& times) {
  survx::RiskTable table;
  for (double t : times) {
    int at_risk = 0;
    for (const survx::SubjectRecord& r : data.records) {
      if (r.time >= t && r.entry_time <= t) ++at_risk;
    }
    table.times.push_back(t);
    table.n_risk.push_back(at_risk);
  }
  return table;
}

/// Distinct drop times of a curve.
inline std::vector<double> drop_times(const survx::SurvivalCurve& km) {
  std::vector<double> out;
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    if (km.events[i] > 0) out.push_back(km.times[i]);
  }
  return out;
}

}  // namespace testutil
