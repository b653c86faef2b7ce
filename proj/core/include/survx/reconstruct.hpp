#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survx/km.hpp"
#include "survx/types.hpp"

namespace survx {

/// Points read off a published survival curve. Times non-decreasing, survival
/// non-increasing, values in [0, 1]; a (0, 1) origin is prepended when absent
/// and exact duplicate points are dropped.
struct DigitizedCurve {
  std::vector<double> times;
  std::vector<double> survival;
};

DigitizedCurve make_digitized_curve(std::vector<double> times, std::vector<double> survival);

/// Published numbers-at-risk rows, optionally with the reported total number
/// of events. n_risk(t) counts subjects with observed time >= t.
struct RiskTable {
  std::vector<double> times;
  std::vector<int> n_risk;
  std::optional<long> total_events;
};

void validate_risk_table(const RiskTable& table);

DigitizedCurve read_digitized_curve_csv(const std::string& path);
/// Rows are `time,n_risk`; an optional footer row `total_events,<count>`
/// carries the reported event total.
RiskTable read_risk_table_csv(const std::string& path);

/// Rebuilds pseudo individual patient data from a digitized curve and its
/// risk table by inverting the product-limit construction. Event and at-risk
/// counts are recovered by snapping each curve drop to the nearest feasible
/// integer pair (tolerance 0.5 / n_risk); censor times are spread uniformly
/// within the gaps the counts assign them to. Numbers at risk match the table
/// exactly; when total_events is present the reconstruction matches it by
/// adjusting censoring beyond the last table row. Inconsistent inputs (e.g.
/// a drop across which the table holds n_risk constant) raise
/// std::runtime_error naming the interval.
Dataset reconstruct_ipd(const DigitizedCurve& curve, const RiskTable& risk,
                        Arm arm = Arm::soc);

/// Expands a life table into pseudo records: per interval, n_events deaths
/// and n_censored censorings at the interval midpoint; subjects still at risk
/// after the last interval are censored at the table's end.
Dataset lifetable_to_ipd(const LifeTable& table, Source source = Source::reconstructed,
                         Arm arm = Arm::soc);

}  // namespace survx
