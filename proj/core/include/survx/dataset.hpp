#pragma once

#include <string>

#include "survx/types.hpp"

namespace survx {

/// Column-name mapping for IPD files whose headers differ from the default
/// `id,time,event,arm[,entry_time]`.
struct IpdColumns {
  std::string id = "id";
  std::string time = "time";
  std::string event = "event";
  std::string arm = "arm";
  std::string entry_time = "entry_time";  // optional column
};

/// Loads individual patient data from CSV. Errors name the offending row.
Dataset load_ipd(const std::string& path, const IpdColumns& columns = {});

void write_ipd_csv(const std::string& path, const Dataset& data,
                   const std::string& header_comment = {});

enum class TrimMode {
  recensor,  // records beyond the cut are censored at the cut (default)
  drop,      // records beyond the cut are removed
};

/// Removes the tail of the follow-up window: with t_cut = (1 - fraction) *
/// max time, records beyond t_cut are re-censored at t_cut (or dropped, by
/// mode) and records entering at or after t_cut are removed. fraction in
/// [0, 1); fraction 0 returns the data unchanged.
Dataset trim_tail(const Dataset& data, double fraction, TrimMode mode = TrimMode::recensor);

/// Same operation with an explicit cut time; trim_tail derives the cut from
/// the data. Trimming at a fixed cut is idempotent.
Dataset trim_at(const Dataset& data, double t_cut, TrimMode mode = TrimMode::recensor);

/// Splices registry follow-up beyond join_time onto trial data: keeps every
/// trial record, and registry records with time > join_time entering the risk
/// set at max(entry_time, join_time). Registry records fully inside the trial
/// window are excluded. No curve rescaling is applied; the delayed entry is
/// what ties the two sources together.
Dataset blend(const Dataset& rct, const Dataset& registry, double join_time);

}  // namespace survx
