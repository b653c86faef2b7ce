#pragma once

#include <string>
#include <vector>

#include "survx/types.hpp"

namespace survx {

/// Right-continuous survival step function. For product-limit estimates the
/// steps sit at distinct event times and `events`/`at_risk` hold the counts
/// behind each step; model-based curves leave `events` empty and `at_risk`
/// zero. survival(t) = 1 before the first step time.
struct SurvivalCurve {
  std::vector<double> times;
  std::vector<double> survival;
  std::vector<int> at_risk;
  std::vector<double> se;
  std::vector<int> events;
};

/// Actuarial life table over uniform intervals [start, start + width).
struct LifeTable {
  std::vector<double> interval_starts;
  std::vector<int> n_risk;
  std::vector<int> n_events;
  std::vector<int> n_censored;
  std::vector<double> survival;  // at interval end
  double interval_width = 0.0;
};

/// Product-limit estimate with Greenwood standard errors. Delayed entry is
/// honoured (a subject is at risk at t when entry_time < t <= time); ties are
/// resolved events-first, so a subject censored at an event time still counts
/// as at risk there.
SurvivalCurve kaplan_meier(const Dataset& data);

/// Actuarial estimate with the standard half-censoring adjustment
/// (effective n = n_risk - n_censored / 2).
LifeTable life_table(const Dataset& data, double interval_width);

/// Step-function lookup; returns 1 before the first step.
double curve_survival_at(const SurvivalCurve& curve, double t);

void write_curve_csv(const std::string& path, const SurvivalCurve& curve,
                     const std::string& header_comment = {});
void write_lifetable_csv(const std::string& path, const LifeTable& table,
                         const std::string& header_comment = {});
LifeTable read_lifetable_csv(const std::string& path);

}  // namespace survx
