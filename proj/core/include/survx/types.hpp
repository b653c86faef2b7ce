#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace survx {

enum class Arm { soc, experimental };
enum class Source { rct, registry, reconstructed };

std::string to_string(Arm arm);
std::string to_string(Source source);
Arm parse_arm(std::string_view text);
Source parse_source(std::string_view text);

/// One right-censored, possibly left-truncated survival observation.
struct SubjectRecord {
  std::string id;
  double time = 0.0;        // months since the time origin
  bool event = false;       // true = death observed, false = right-censored
  Arm arm = Arm::soc;
  Source source = Source::rct;
  double entry_time = 0.0;  // delayed-entry (left truncation) time; 0 for trial subjects
};

/// Throws std::invalid_argument unless rec.time > rec.entry_time >= 0.
void validate_record(const SubjectRecord& rec, const std::string& context = {});

struct Dataset {
  std::vector<SubjectRecord> records;
  std::string label;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t event_count() const;
  double max_time() const;  // throws std::invalid_argument on an empty dataset
  Dataset filter_arm(Arm arm) const;
};

/// External long-term survival constraint: an observed survival probability
/// s_obs (with variance var_obs) at time t_obs, applied with precision
/// (1/var_obs)^alpha. alpha near 0 leaves the fit unconstrained; alpha = 2
/// pins the model to the observation.
struct LongTermAnchor {
  double t_obs = 0.0;
  double s_obs = 0.0;
  double var_obs = 0.0;
  double alpha = 1.0;
};

void validate_anchor(const LongTermAnchor& anchor);

}  // namespace survx
