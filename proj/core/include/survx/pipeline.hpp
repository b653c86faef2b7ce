#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "survx/parametric.hpp"
#include "survx/types.hpp"

namespace survx {

inline constexpr const char* kToolVersion = "0.1.0";

/// Raised for configuration mistakes that should stop a run before any
/// computation (missing inputs, contradictory flags).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Effective configuration for one tool invocation, assembled from an
/// optional flat key=value file overlaid by command-line flags.
struct RunConfig {
  std::string input;               // IPD CSV
  std::string registry_ipd;        // registry IPD CSV
  std::string registry_lifetable;  // registry life-table CSV
  std::string curve;               // digitized curve CSV (reconstruct)
  std::string risk;                // risk table CSV (reconstruct)
  std::string lifetable;           // life-table CSV (reconstruct)
  std::optional<Arm> arm;
  double trim = 0.0;
  std::string trim_mode = "recensor";  // recensor | drop
  std::optional<double> join;          // blend join time; defaults to the trim cut
  double horizon = 72.0;
  double grid_step = 1.0;  // months, for exported model curves
  std::uint64_t seed = 1;
  std::string out = ".";
  std::vector<double> alpha = {0.001, 0.2, 1.0, 1.5, 2.0};
  std::optional<double> anchor_t, anchor_s, anchor_var;
  int chains = 4;
  int warmup = 5000;
  int kept = 5000;
  int thin = 1;
  std::vector<ModelKind> models{ModelKind::exponential, ModelKind::weibull,
                                ModelKind::lognormal, ModelKind::loglogistic,
                                ModelKind::gompertz};
  std::string bayes_kind = "both";  // lognormal | loglogistic | both
  std::string scheme = "dic";       // bma weighting scheme
  bool raw_inverse_dic = false;
  bool isotonic = false;  // non-increasing projection of the smoothed curve
  std::string historical;  // optional power-prior historical IPD CSV
  double alpha0 = 0.0;
  double lifetable_width = 6.0;  // months, for the km subcommand's table output

  LongTermAnchor anchor_or_throw() const;  // requires all three anchor fields
  bool has_anchor() const;

  /// Canonical `key=value` serialization of the effective configuration.
  std::string canonical_string() const;
  /// FNV-1a hash of the canonical string, as fixed-width hex.
  std::string config_hash() const;
  /// Header comment embedded at the top of every output file.
  std::string output_header(const std::string& command) const;
};

std::map<std::string, std::string> load_config_file(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

void run_km(const RunConfig& config);
void run_fit(const RunConfig& config);
void run_reconstruct(const RunConfig& config);
void run_blend(const RunConfig& config);
void run_bayes(const RunConfig& config);
void run_bma(const RunConfig& config);
void run_report(const RunConfig& config);

}  // namespace survx
