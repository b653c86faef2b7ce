#include "survx/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "survx/bayes.hpp"
#include "survx/bma.hpp"
#include "survx/csv.hpp"
#include "survx/dataset.hpp"
#include "survx/km.hpp"
#include "survx/metrics.hpp"
#include "survx/nonparametric.hpp"
#include "survx/numerics.hpp"
#include "survx/reconstruct.hpp"
#include "survx/svg.hpp"

namespace survx {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Configuration plumbing

double to_double(const std::string& value, const std::string& key) {
  try {
    return parse_double(value, "configuration key '" + key + "'");
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

long to_long(const std::string& value, const std::string& key) {
  try {
    return parse_long(value, "configuration key '" + key + "'");
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

bool to_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw UsageError("configuration key '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(value);
  while (std::getline(is, part, ',')) {
    const auto a = part.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = part.find_last_not_of(" \t");
    parts.push_back(part.substr(a, b - a + 1));
  }
  return parts;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

std::string opt_str(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

TrimMode trim_mode_of(const RunConfig& config) {
  if (config.trim_mode == "recensor") return TrimMode::recensor;
  if (config.trim_mode == "drop") return TrimMode::drop;
  throw UsageError("trim_mode must be 'recensor' or 'drop', got '" + config.trim_mode + "'");
}

// ---------------------------------------------------------------------------
// Shared command scaffolding

void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " is required for this command");
  if (!fs::exists(path)) throw UsageError(what + " '" + path + "' does not exist");
}

bool any_anchor(const RunConfig& config) {
  return config.anchor_t || config.anchor_s || config.anchor_var;
}

void reject_anchor(const RunConfig& config, const std::string& command) {
  if (any_anchor(config)) {
    throw UsageError("anchor settings apply to the bayes and report commands, not '" + command +
                     "'");
  }
}

void reject_registry(const RunConfig& config, const std::string& command) {
  if (!config.registry_ipd.empty() || !config.registry_lifetable.empty()) {
    throw UsageError("registry inputs apply to the blend and report commands, not '" + command +
                     "'");
  }
}

void reject_reconstruction_inputs(const RunConfig& config, const std::string& command) {
  if (!config.curve.empty() || !config.risk.empty() || !config.lifetable.empty()) {
    throw UsageError("digitized-curve inputs apply to the reconstruct command, not '" + command +
                     "'");
  }
}

fs::path out_file(const RunConfig& config, const std::string& name) {
  fs::create_directories(config.out);
  return fs::path(config.out) / name;
}

/// Plain CSV writer: '#' header comment, then the column row, then data rows.
void write_table(const fs::path& path, const std::string& comment, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  if (!comment.empty()) file << "# " << comment << "\n";
  file << header << "\n";
  for (const std::string& row : rows) file << row << "\n";
  if (!file) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Loads the trial IPD, applies the arm filter and the tail trim.
Dataset load_current(const RunConfig& config) {
  Dataset data = load_ipd(config.input);
  if (config.arm) {
    data = data.filter_arm(*config.arm);
    if (data.empty()) {
      throw UsageError("no records for arm '" + to_string(*config.arm) + "' in '" +
                       config.input + "'");
    }
  }
  if (config.trim > 0.0) data = trim_tail(data, config.trim, trim_mode_of(config));
  return data;
}

/// The time the trimmed follow-up ends; blend joins default to it.
double trim_cut(const RunConfig& config, const Dataset& untrimmed) {
  return (1.0 - config.trim) * untrimmed.max_time();
}

Dataset load_registry(const RunConfig& config) {
  if (!config.registry_ipd.empty() && !config.registry_lifetable.empty()) {
    throw UsageError("give either --registry-ipd or --registry-lifetable, not both");
  }
  if (!config.registry_ipd.empty()) {
    Dataset registry = load_ipd(config.registry_ipd);
    for (auto& rec : registry.records) rec.source = Source::registry;
    registry.label = "registry";
    return registry;
  }
  const LifeTable table = read_lifetable_csv(config.registry_lifetable);
  Dataset registry = lifetable_to_ipd(table, Source::registry,
                                      config.arm ? *config.arm : Arm::soc);
  registry.label = "registry";
  return registry;
}

std::vector<double> time_grid(const RunConfig& config) {
  if (!(config.grid_step > 0.0)) throw UsageError("grid_step must be positive");
  if (!(config.horizon > 0.0)) throw UsageError("horizon must be positive");
  std::vector<double> grid;
  for (double t = 0.0; t < config.horizon; t += config.grid_step) grid.push_back(t);
  grid.push_back(config.horizon);
  return grid;
}

McmcConfig mcmc_config(const RunConfig& config) {
  McmcConfig mc;
  mc.chains = config.chains;
  mc.warmup = config.warmup;
  mc.kept = config.kept;
  mc.thin = config.thin;
  mc.seed = config.seed;
  validate_mcmc_config(mc);
  return mc;
}

std::vector<ModelKind> bayes_kinds(const RunConfig& config) {
  if (config.bayes_kind == "lognormal") return {ModelKind::lognormal};
  if (config.bayes_kind == "loglogistic") return {ModelKind::loglogistic};
  if (config.bayes_kind == "both") return {ModelKind::lognormal, ModelKind::loglogistic};
  throw UsageError("bayes_kind must be 'lognormal', 'loglogistic' or 'both', got '" +
                   config.bayes_kind + "'");
}

// Natural-scale standard error from the unconstrained covariance: parameters
// optimized on the log scale pick up a factor of the estimate itself.
double natural_se(ModelKind kind, int index, double estimate, double se_u) {
  const bool identity_scale = (kind == ModelKind::lognormal && index == 0) ||
                              (kind == ModelKind::gompertz && index == 1);
  return identity_scale ? se_u : std::abs(estimate) * se_u;
}

std::vector<double> param_values(ModelKind kind, const ModelParams& params) {
  switch (kind) {
    case ModelKind::exponential: return {params.rate};
    case ModelKind::weibull:
    case ModelKind::loglogistic:
    case ModelKind::gompertz: return {params.rate, params.shape};
    case ModelKind::lognormal: return {params.meanlog, params.sdlog};
  }
  return {};
}

struct FitRow {
  ParametricFit fit;
  RestrictedAuc auc;
};

/// Fits the requested models and formats the information-criterion report.
std::vector<ParametricFit> fit_models(const RunConfig& config, const Dataset& data) {
  if (config.models.empty()) throw UsageError("no models requested");
  std::vector<ParametricFit> fits;
  fits.reserve(config.models.size());
  for (ModelKind kind : config.models) fits.push_back(fit_mle(kind, data));
  return fits;
}

void write_fit_report(const RunConfig& config, const std::string& command,
                      const std::vector<ParametricFit>& fits, const std::string& filename) {
  std::vector<std::string> rows;
  for (const ParametricFit& fit : fits) {
    const std::vector<std::string> names = param_names(fit.kind);
    const std::vector<double> values = param_values(fit.kind, fit.params);
    std::ostringstream row;
    row << to_string(fit.kind);
    for (std::size_t i = 0; i < 2; ++i) {
      if (i < names.size()) {
        const double se_u = fit.covariance.dim > static_cast<int>(i)
                                ? std::sqrt(std::max(
                                      fit.covariance.at(static_cast<int>(i), static_cast<int>(i)),
                                      0.0))
                                : 0.0;
        row << "," << names[i] << "," << format_double(values[i]) << ","
            << format_double(natural_se(fit.kind, static_cast<int>(i), values[i], se_u));
      } else {
        row << ",,,";
      }
    }
    row << "," << format_double(fit.minus2_loglik) << "," << format_double(fit.aic) << ","
        << format_double(fit.bic) << "," << (fit.converged ? "1" : "0");
    rows.push_back(row.str());
  }
  write_table(out_file(config, filename), config.output_header(command),
              "model,param1,estimate1,se1,param2,estimate2,se2,minus2_loglik,aic,bic,converged",
              rows);
}

void write_model_curves(const RunConfig& config, const std::string& command,
                        const std::vector<ParametricFit>& fits,
                        const std::vector<double>& grid, const std::string& filename) {
  std::vector<std::string> rows;
  for (const ParametricFit& fit : fits) {
    const SurvivalCurve curve = extrapolate(fit, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      rows.push_back(to_string(fit.kind) + "," + format_double(curve.times[g]) + "," +
                     format_double(curve.survival[g]) + "," + format_double(curve.se[g]));
    }
  }
  write_table(out_file(config, filename), config.output_header(command),
              "model,time,survival,se", rows);
}

const ParametricFit& best_by_aic(const std::vector<ParametricFit>& fits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < fits.size(); ++i) {
    if (fits[i].aic < fits[best].aic) best = i;
  }
  return fits[best];
}

/// Smoothed curve over the grid, with the bandwidth, the in-sample
/// -2 log likelihood, and the extrapolation caution in the header.
void write_nonparametric_curve(const RunConfig& config, const std::string& command,
                               const SurvivalCurve& km, const std::vector<double>& grid) {
  const LocalLinearModel model = fit_local_linear(km);
  std::vector<double> smooth;
  smooth.reserve(grid.size());
  for (double t : grid) smooth.push_back(predict(model, t));
  if (config.isotonic) smooth = isotonic_decreasing(smooth);
  std::vector<std::string> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    rows.push_back(format_double(grid[g]) + "," + format_double(smooth[g]));
  }
  std::ostringstream comment;
  comment << config.output_header(command)
          << " | bandwidth=" << format_double(model.bandwidth)
          << " | minus2_loglik=" << format_double(minus2_log_likelihood(model));
  if (km.times.back() < config.horizon) {
    comment << " | caution: extrapolation beyond " << format_double(km.times.back())
            << " months is unreliable (no follow-up data out there)";
  }
  write_table(out_file(config, "nonparametric_curve.csv"), comment.str(), "time,survival", rows);
}

// ---------------------------------------------------------------------------
// Bayesian helpers shared by run_bayes, run_bma and run_report

struct BayesRun {
  ModelKind kind = ModelKind::lognormal;
  std::optional<double> alpha;  // anchor power; empty for unconstrained runs
  double alpha0 = 0.0;
  bool with_historical = false;
  PosteriorSample sample;
  RestrictedAuc auc;
  double anchor_survival_mean = 0.0;
  double anchor_survival_sd = 0.0;
};

BayesRun run_one_posterior(const RunConfig& config, ModelKind kind, const Dataset& current,
                           const Dataset* historical, double alpha0,
                           const std::optional<LongTermAnchor>& anchor) {
  PowerPriorSpec spec;
  if (historical) {
    spec.historical = *historical;
    spec.alpha0 = alpha0;
  }
  spec.anchor = anchor;
  BayesRun run;
  run.kind = kind;
  run.alpha0 = historical ? alpha0 : 0.0;
  run.with_historical = historical != nullptr;
  if (anchor) run.alpha = anchor->alpha;
  run.sample = sample_posterior(kind, current, spec, PriorSpec{}, mcmc_config(config));
  run.auc = auc_posterior(run.sample, config.horizon);
  if (anchor) {
    std::vector<double> at_anchor;
    at_anchor.reserve(run.sample.draws.size());
    for (const ModelParams& p : run.sample.draws) {
      at_anchor.push_back(survival(kind, p, anchor->t_obs));
    }
    run.anchor_survival_mean = mean(at_anchor);
    run.anchor_survival_sd = sample_sd(at_anchor);
  }
  return run;
}

std::string draws_filename(const BayesRun& run) {
  std::string name = "draws_" + to_string(run.kind);
  if (run.alpha) name += "_alpha" + format_double(*run.alpha);
  if (run.with_historical) name += "_registry";
  return name + ".csv";
}

void write_bayes_summary(const RunConfig& config, const std::string& command,
                         const std::vector<BayesRun>& runs) {
  std::vector<std::string> rows;
  for (const BayesRun& run : runs) {
    std::ostringstream row;
    row << to_string(run.kind) << "," << (run.alpha ? format_double(*run.alpha) : std::string())
        << "," << format_double(run.alpha0) << "," << (run.with_historical ? "1" : "0") << ","
        << format_double(run.sample.dic) << "," << format_double(run.sample.pd) << ","
        << format_double(run.auc.value) << "," << format_double(run.auc.se) << ","
        << (run.alpha ? format_double(run.anchor_survival_mean) : std::string()) << ","
        << (run.alpha ? format_double(run.anchor_survival_sd) : std::string()) << ","
        << format_double(run.sample.acceptance_rate) << ","
        << format_double(std::max(run.sample.rhat[0], run.sample.rhat[1])) << ","
        << format_double(std::min(run.sample.ess[0], run.sample.ess[1])) << ","
        << (run.sample.converged ? "1" : "0");
    rows.push_back(row.str());
  }
  write_table(out_file(config, "bayes_summary.csv"), config.output_header(command),
              "model,alpha,alpha0,with_registry,dic,pd,auc_mean,auc_sd,anchor_survival_mean,"
              "anchor_survival_sd,acceptance,rhat_max,ess_min,converged",
              rows);
}

void write_diagnostics(const RunConfig& config, const std::string& command,
                       const std::vector<BayesRun>& runs) {
  std::vector<std::string> rows;
  for (const BayesRun& run : runs) {
    const std::vector<std::string> names = param_names(run.kind);
    for (std::size_t i = 0; i < names.size() && i < 2; ++i) {
      std::ostringstream row;
      row << to_string(run.kind) << ","
          << (run.alpha ? format_double(*run.alpha) : std::string()) << ","
          << (run.with_historical ? "1" : "0") << "," << names[i] << ","
          << format_double(run.sample.rhat[i]) << "," << format_double(run.sample.ess[i]) << ","
          << format_double(run.sample.acceptance_rate);
      rows.push_back(row.str());
    }
  }
  write_table(out_file(config, "diagnostics.csv"), config.output_header(command),
              "model,alpha,with_registry,param,rhat,ess,acceptance", rows);
}

/// Location summary used by the LOCATION weighting scheme: the posterior mean
/// of meanlog (lognormal) or of the rate (log-logistic).
double location_estimate(const BayesRun& run) {
  std::vector<double> values;
  values.reserve(run.sample.draws.size());
  for (const ModelParams& p : run.sample.draws) {
    values.push_back(run.kind == ModelKind::lognormal ? p.meanlog : p.rate);
  }
  return mean(values);
}

std::vector<double> per_draw_auc(const BayesRun& run, double horizon) {
  std::vector<double> values;
  values.reserve(run.sample.draws.size());
  for (const ModelParams& p : run.sample.draws) {
    values.push_back(auc_parametric(run.kind, p, horizon));
  }
  return values;
}

struct BmaResult {
  BmaWeights weights;
  std::vector<BayesRun> runs;  // lognormal then log-logistic
  MixtureSummary auc;
  SurvivalCurve curve;
};

BmaResult run_bma_pair(const RunConfig& config, const Dataset& current,
                       const Dataset* historical, double alpha0,
                       const std::vector<double>& grid) {
  std::vector<BayesRun> runs;
  runs.push_back(run_one_posterior(config, ModelKind::lognormal, current, historical, alpha0,
                                   std::nullopt));
  runs.push_back(run_one_posterior(config, ModelKind::loglogistic, current, historical, alpha0,
                                   std::nullopt));

  std::vector<ModelEvidence> evidence;
  for (const BayesRun& run : runs) {
    ModelEvidence e;
    e.name = to_string(run.kind);
    e.dic = run.sample.dic;
    e.auc = run.auc.value;
    e.location = location_estimate(run);
    evidence.push_back(std::move(e));
  }
  BmaResult result;
  result.weights =
      bma_weights(parse_weight_scheme(config.scheme), evidence, config.raw_inverse_dic);

  std::vector<CurveDraws> components;
  components.push_back(posterior_curve_draws(runs[0].sample, grid));
  components.push_back(posterior_curve_draws(runs[1].sample, grid));
  result.curve = average_curve(result.weights, components, grid);

  std::vector<std::vector<double>> draw_aucs;
  draw_aucs.push_back(per_draw_auc(runs[0], config.horizon));
  draw_aucs.push_back(per_draw_auc(runs[1], config.horizon));
  result.auc = mixture_moments(result.weights, draw_aucs);
  result.runs = std::move(runs);
  return result;
}

void write_bma_report(const RunConfig& config, const std::string& command,
                      const std::vector<std::pair<std::string, const BmaResult*>>& variants) {
  std::vector<std::string> rows;
  for (const auto& [variant, result] : variants) {
    for (std::size_t m = 0; m < result->runs.size(); ++m) {
      const BayesRun& run = result->runs[m];
      std::ostringstream row;
      row << variant << "," << to_string(result->weights.scheme) << "," << to_string(run.kind)
          << "," << format_double(result->weights.w[m]) << ","
          << format_double(run.sample.dic) << "," << format_double(run.auc.value) << ","
          << format_double(location_estimate(run)) << ","
          << format_double(result->auc.mean) << "," << format_double(result->auc.sd);
      rows.push_back(row.str());
    }
  }
  write_table(out_file(config, "bma_report.csv"), config.output_header(command),
              "variant,scheme,model,weight,dic,auc_mean,location,mixture_auc_mean,"
              "mixture_auc_sd",
              rows);
}

void write_bma_curve(const RunConfig& config, const std::string& command,
                     const SurvivalCurve& curve, const std::string& filename) {
  std::vector<std::string> rows;
  for (std::size_t g = 0; g < curve.times.size(); ++g) {
    rows.push_back(format_double(curve.times[g]) + "," + format_double(curve.survival[g]) + "," +
                   format_double(curve.se[g]));
  }
  write_table(out_file(config, filename), config.output_header(command), "time,survival,se",
              rows);
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

bool RunConfig::has_anchor() const { return anchor_t && anchor_s && anchor_var; }

LongTermAnchor RunConfig::anchor_or_throw() const {
  if (!has_anchor()) {
    throw UsageError(
        "an anchor needs --anchor-t, --anchor-s and --anchor-var together");
  }
  LongTermAnchor anchor;
  anchor.t_obs = *anchor_t;
  anchor.s_obs = *anchor_s;
  anchor.var_obs = *anchor_var;
  anchor.alpha = 1.0;  // callers set the power per run
  try {
    validate_anchor(anchor);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return anchor;
}

std::string RunConfig::canonical_string() const {
  std::ostringstream os;
  os << "input=" << input << ";registry_ipd=" << registry_ipd
     << ";registry_lifetable=" << registry_lifetable << ";curve=" << curve << ";risk=" << risk
     << ";lifetable=" << lifetable << ";arm=" << (arm ? to_string(*arm) : std::string())
     << ";trim=" << format_double(trim) << ";trim_mode=" << trim_mode << ";join=" << opt_str(join)
     << ";horizon=" << format_double(horizon) << ";grid_step=" << format_double(grid_step)
     << ";seed=" << seed << ";out=" << out << ";alpha=" << join_doubles(alpha)
     << ";anchor_t=" << opt_str(anchor_t) << ";anchor_s=" << opt_str(anchor_s)
     << ";anchor_var=" << opt_str(anchor_var) << ";chains=" << chains << ";warmup=" << warmup
     << ";kept=" << kept << ";thin=" << thin << ";models=";
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (i) os << ",";
    os << to_string(models[i]);
  }
  os << ";bayes_kind=" << bayes_kind << ";scheme=" << scheme
     << ";raw_inverse_dic=" << (raw_inverse_dic ? "1" : "0")
     << ";isotonic=" << (isotonic ? "1" : "0") << ";historical=" << historical
     << ";alpha0=" << format_double(alpha0)
     << ";lifetable_width=" << format_double(lifetable_width);
  return os.str();
}

std::string RunConfig::config_hash() const {
  const std::uint64_t h = fnv1a(canonical_string());
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string RunConfig::output_header(const std::string& command) const {
  std::ostringstream os;
  os << "survx " << kToolVersion << " | command=" << command << " | config=" << config_hash()
     << " | seed=" << seed;
  return os.str();
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open configuration file '" + path + "'");
  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const auto a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    const auto b = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(a, b - a + 1);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw UsageError("configuration file '" + path + "' line " + std::to_string(line_number) +
                       ": expected key=value");
    }
    std::string key = body.substr(0, eq);
    std::string value = body.substr(eq + 1);
    const auto ka = key.find_last_not_of(" \t");
    key = ka == std::string::npos ? std::string() : key.substr(0, ka + 1);
    const auto va = value.find_first_not_of(" \t");
    value = va == std::string::npos ? std::string() : value.substr(va);
    if (key.empty()) {
      throw UsageError("configuration file '" + path + "' line " + std::to_string(line_number) +
                       ": empty key");
    }
    entries[key] = value;
  }
  return entries;
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "input") {
    config.input = value;
  } else if (key == "registry_ipd") {
    config.registry_ipd = value;
  } else if (key == "registry_lifetable") {
    config.registry_lifetable = value;
  } else if (key == "curve") {
    config.curve = value;
  } else if (key == "risk") {
    config.risk = value;
  } else if (key == "lifetable") {
    config.lifetable = value;
  } else if (key == "arm") {
    try {
      config.arm = parse_arm(value);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else if (key == "trim") {
    config.trim = to_double(value, key);
  } else if (key == "trim_mode") {
    config.trim_mode = value;
  } else if (key == "join") {
    config.join = to_double(value, key);
  } else if (key == "horizon") {
    config.horizon = to_double(value, key);
  } else if (key == "grid_step") {
    config.grid_step = to_double(value, key);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(to_long(value, key));
  } else if (key == "out") {
    config.out = value;
  } else if (key == "alpha") {
    config.alpha.clear();
    for (const std::string& part : split_list(value)) {
      config.alpha.push_back(to_double(part, key));
    }
    if (config.alpha.empty()) throw UsageError("alpha list is empty");
  } else if (key == "anchor_t") {
    config.anchor_t = to_double(value, key);
  } else if (key == "anchor_s") {
    config.anchor_s = to_double(value, key);
  } else if (key == "anchor_var") {
    config.anchor_var = to_double(value, key);
  } else if (key == "chains") {
    config.chains = static_cast<int>(to_long(value, key));
  } else if (key == "warmup") {
    config.warmup = static_cast<int>(to_long(value, key));
  } else if (key == "kept") {
    config.kept = static_cast<int>(to_long(value, key));
  } else if (key == "thin") {
    config.thin = static_cast<int>(to_long(value, key));
  } else if (key == "models") {
    config.models.clear();
    if (value == "none") return;  // product-limit-only report
    for (const std::string& part : split_list(value)) {
      try {
        config.models.push_back(parse_model_kind(part));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
    if (config.models.empty()) throw UsageError("model list is empty");
  } else if (key == "bayes_kind") {
    config.bayes_kind = value;
  } else if (key == "scheme") {
    config.scheme = value;
  } else if (key == "raw_inverse_dic") {
    config.raw_inverse_dic = to_bool(value, key);
  } else if (key == "isotonic") {
    config.isotonic = to_bool(value, key);
  } else if (key == "historical") {
    config.historical = value;
  } else if (key == "alpha0") {
    config.alpha0 = to_double(value, key);
  } else if (key == "lifetable_width") {
    config.lifetable_width = to_double(value, key);
  } else {
    throw UsageError("unknown configuration key '" + key + "'");
  }
}

// ---------------------------------------------------------------------------
// Commands

void run_km(const RunConfig& config) {
  reject_anchor(config, "km");
  reject_registry(config, "km");
  reject_reconstruction_inputs(config, "km");
  require_input(config.input, "--input");

  const Dataset data = load_current(config);
  const SurvivalCurve km = kaplan_meier(data);
  write_curve_csv(out_file(config, "km.csv").string(), km, config.output_header("km"));
  const LifeTable table = life_table(data, config.lifetable_width);
  write_lifetable_csv(out_file(config, "lifetable.csv").string(), table,
                      config.output_header("km"));
}

void run_fit(const RunConfig& config) {
  reject_anchor(config, "fit");
  reject_registry(config, "fit");
  reject_reconstruction_inputs(config, "fit");
  require_input(config.input, "--input");

  const Dataset data = load_current(config);
  const std::vector<double> grid = time_grid(config);
  const std::vector<ParametricFit> fits = fit_models(config, data);
  write_fit_report(config, "fit", fits, "fit_report.csv");
  write_model_curves(config, "fit", fits, grid, "model_curves.csv");
  write_nonparametric_curve(config, "fit", kaplan_meier(data), grid);
}

void run_reconstruct(const RunConfig& config) {
  reject_anchor(config, "reconstruct");
  reject_registry(config, "reconstruct");
  if (!config.input.empty()) {
    throw UsageError("reconstruct reads --curve/--risk or --lifetable, not --input");
  }
  const bool have_curve = !config.curve.empty() || !config.risk.empty();
  const bool have_table = !config.lifetable.empty();
  if (have_curve && have_table) {
    throw UsageError("give either a digitized curve with its risk table or a life table, "
                     "not both");
  }
  if (!have_curve && !have_table) {
    throw UsageError("reconstruct needs --curve with --risk, or --lifetable");
  }

  Dataset ipd;
  if (have_curve) {
    require_input(config.curve, "--curve");
    require_input(config.risk, "--risk");
    const DigitizedCurve curve = read_digitized_curve_csv(config.curve);
    const RiskTable risk = read_risk_table_csv(config.risk);
    ipd = reconstruct_ipd(curve, risk, config.arm ? *config.arm : Arm::soc);
  } else {
    require_input(config.lifetable, "--lifetable");
    const LifeTable table = read_lifetable_csv(config.lifetable);
    ipd = lifetable_to_ipd(table, Source::reconstructed, config.arm ? *config.arm : Arm::soc);
  }
  write_ipd_csv(out_file(config, "reconstructed.csv").string(), ipd,
                config.output_header("reconstruct"));
  if (ipd.event_count() > 0) {
    write_curve_csv(out_file(config, "reconstructed_km.csv").string(), kaplan_meier(ipd),
                    config.output_header("reconstruct"));
  }
}

void run_blend(const RunConfig& config) {
  reject_anchor(config, "blend");
  reject_reconstruction_inputs(config, "blend");
  require_input(config.input, "--input");
  if (config.registry_ipd.empty() && config.registry_lifetable.empty()) {
    throw UsageError("blend needs a registry input (--registry-ipd or --registry-lifetable)");
  }
  if (!config.registry_ipd.empty()) require_input(config.registry_ipd, "--registry-ipd");
  if (!config.registry_lifetable.empty()) {
    require_input(config.registry_lifetable, "--registry-lifetable");
  }

  Dataset untrimmed = load_ipd(config.input);
  if (config.arm) untrimmed = untrimmed.filter_arm(*config.arm);
  if (untrimmed.empty()) throw UsageError("no trial records after the arm filter");
  const double cut = trim_cut(config, untrimmed);
  const Dataset rct =
      config.trim > 0.0 ? trim_tail(untrimmed, config.trim, trim_mode_of(config)) : untrimmed;
  const Dataset registry = load_registry(config);
  const double join = config.join ? *config.join : cut;
  const Dataset blended = blend(rct, registry, join);

  write_ipd_csv(out_file(config, "blended.csv").string(), blended,
                config.output_header("blend"));
  write_curve_csv(out_file(config, "blended_km.csv").string(), kaplan_meier(blended),
                  config.output_header("blend"));
}

void run_bayes(const RunConfig& config) {
  reject_registry(config, "bayes");
  reject_reconstruction_inputs(config, "bayes");
  require_input(config.input, "--input");
  if (!config.historical.empty()) require_input(config.historical, "--historical");
  if (config.alpha0 < 0.0 || config.alpha0 > 2.0) {
    throw UsageError("alpha0 must lie in [0, 2]");
  }
  if (config.alpha0 > 0.0 && config.historical.empty()) {
    throw UsageError("alpha0 > 0 needs historical data (--historical)");
  }

  const Dataset data = load_current(config);
  std::optional<Dataset> historical;
  if (!config.historical.empty()) historical = load_ipd(config.historical);
  const Dataset* hist = historical ? &*historical : nullptr;

  std::vector<BayesRun> runs;
  for (ModelKind kind : bayes_kinds(config)) {
    if (config.has_anchor() || any_anchor(config)) {
      LongTermAnchor anchor = config.anchor_or_throw();
      for (double a : config.alpha) {
        anchor.alpha = a;
        runs.push_back(
            run_one_posterior(config, kind, data, hist, config.alpha0, anchor));
      }
    } else {
      runs.push_back(
          run_one_posterior(config, kind, data, hist, config.alpha0, std::nullopt));
    }
  }

  write_bayes_summary(config, "bayes", runs);
  write_diagnostics(config, "bayes", runs);
  for (const BayesRun& run : runs) {
    write_draws_csv(out_file(config, draws_filename(run)).string(), run.sample,
                    config.output_header("bayes"));
  }
}

void run_bma(const RunConfig& config) {
  reject_anchor(config, "bma");
  reject_registry(config, "bma");
  reject_reconstruction_inputs(config, "bma");
  require_input(config.input, "--input");
  if (!config.historical.empty()) require_input(config.historical, "--historical");
  if (config.alpha0 > 0.0 && config.historical.empty()) {
    throw UsageError("alpha0 > 0 needs historical data (--historical)");
  }

  const Dataset data = load_current(config);
  std::optional<Dataset> historical;
  if (!config.historical.empty()) historical = load_ipd(config.historical);
  const std::vector<double> grid = time_grid(config);

  const BmaResult result = run_bma_pair(config, data, historical ? &*historical : nullptr,
                                        config.alpha0, grid);
  write_bma_report(config, "bma", {{"current", &result}});
  write_bma_curve(config, "bma", result.curve, "bma_curve.csv");
  write_bayes_summary(config, "bma", result.runs);
  write_diagnostics(config, "bma", result.runs);
}

void run_report(const RunConfig& config) {
  reject_reconstruction_inputs(config, "report");
  require_input(config.input, "--input");
  const bool have_registry = !config.registry_ipd.empty() || !config.registry_lifetable.empty();
  if (!config.registry_ipd.empty()) require_input(config.registry_ipd, "--registry-ipd");
  if (!config.registry_lifetable.empty()) {
    require_input(config.registry_lifetable, "--registry-lifetable");
  }
  if (any_anchor(config) && !config.has_anchor()) config.anchor_or_throw();  // message

  // --- data
  Dataset untrimmed = load_ipd(config.input);
  if (config.arm) untrimmed = untrimmed.filter_arm(*config.arm);
  if (untrimmed.empty()) throw UsageError("no trial records after the arm filter");
  const double cut = trim_cut(config, untrimmed);
  const Dataset data =
      config.trim > 0.0 ? trim_tail(untrimmed, config.trim, trim_mode_of(config)) : untrimmed;
  const std::vector<double> grid = time_grid(config);
  const std::string arm_label = config.arm ? to_string(*config.arm) : "all";

  // --- baseline estimates
  const SurvivalCurve km = kaplan_meier(data);
  write_curve_csv(out_file(config, "km.csv").string(), km, config.output_header("report"));
  write_lifetable_csv(out_file(config, "lifetable.csv").string(),
                      life_table(data, config.lifetable_width),
                      config.output_header("report"));

  // No models requested: the report degrades to the product-limit estimate,
  // its life table, and a plot of the observed curve alone.
  if (config.models.empty()) {
    SvgPlot plot(config.horizon, "Survival (" + arm_label + ")");
    plot.add_step_curve(km, "product-limit", "#1f6fb2");
    if (config.has_anchor()) {
      const LongTermAnchor anchor = config.anchor_or_throw();
      plot.add_anchor_tick(anchor.t_obs, anchor.s_obs,
                           "anchor " + format_double(anchor.s_obs) + " @ " +
                               format_double(anchor.t_obs));
    }
    plot.write(out_file(config, "report.svg").string(), config.output_header("report"));
    return;
  }

  // --- maximum likelihood fits and the smoothed curve
  const std::vector<ParametricFit> fits = fit_models(config, data);
  write_fit_report(config, "report", fits, "fit_report.csv");
  write_model_curves(config, "report", fits, grid, "model_curves.csv");
  write_nonparametric_curve(config, "report", km, grid);
  const ParametricFit& best = best_by_aic(fits);

  // --- registry blend
  std::optional<Dataset> registry;
  std::optional<Dataset> blended;
  std::optional<ParametricFit> blended_best;
  double join = config.join ? *config.join : cut;
  if (have_registry) {
    registry = load_registry(config);
    blended = blend(data, *registry, join);
    write_ipd_csv(out_file(config, "blended.csv").string(), *blended,
                  config.output_header("report"));
    write_curve_csv(out_file(config, "blended_km.csv").string(), kaplan_meier(*blended),
                    config.output_header("report"));
    const std::vector<ParametricFit> blended_fits = fit_models(config, *blended);
    blended_best = best_by_aic(blended_fits);
  }

  // --- Bayesian runs
  std::vector<BayesRun> bayes_runs;
  const BayesRun* power_row = nullptr;
  const BayesRun* power_registry_row = nullptr;
  // Full borrowing is the report default when a registry is present and no
  // explicit alpha0 was configured.
  const double alpha0_eff = config.alpha0 > 0.0 ? config.alpha0 : 1.0;
  if (config.has_anchor()) {
    LongTermAnchor anchor = config.anchor_or_throw();
    std::vector<double> alphas = config.alpha;
    if (alphas.empty()) throw UsageError("alpha grid is empty");
    const double alpha_max = *std::max_element(alphas.begin(), alphas.end());
    for (ModelKind kind : bayes_kinds(config)) {
      for (double a : alphas) {
        anchor.alpha = a;
        bayes_runs.push_back(
            run_one_posterior(config, kind, data, nullptr, 0.0, anchor));
      }
      if (have_registry) {
        for (double a : alphas) {
          anchor.alpha = a;
          bayes_runs.push_back(
              run_one_posterior(config, kind, data, &*registry, alpha0_eff, anchor));
        }
      }
    }
    // The headline power-prior rows use the stiffest anchor of the grid and
    // the first configured model kind.
    const ModelKind head_kind = bayes_kinds(config).front();
    for (const BayesRun& run : bayes_runs) {
      if (run.kind != head_kind || !run.alpha || *run.alpha != alpha_max) continue;
      if (!run.with_historical && power_row == nullptr) power_row = &run;
      if (run.with_historical && power_registry_row == nullptr) power_registry_row = &run;
    }
  }
  if (!bayes_runs.empty()) {
    write_bayes_summary(config, "report", bayes_runs);
    write_diagnostics(config, "report", bayes_runs);
  }

  // --- model averaging
  const BmaResult bma_rct = run_bma_pair(config, data, nullptr, 0.0, grid);
  std::optional<BmaResult> bma_registry;
  if (have_registry) {
    bma_registry = run_bma_pair(config, data, &*registry, alpha0_eff, grid);
  }
  std::vector<std::pair<std::string, const BmaResult*>> bma_variants;
  bma_variants.emplace_back("rct_only", &bma_rct);
  if (bma_registry) bma_variants.emplace_back("with_registry", &*bma_registry);
  write_bma_report(config, "report", bma_variants);
  write_bma_curve(config, "report", bma_rct.curve, "bma_curve.csv");

  // --- restricted-AUC comparison table
  std::vector<std::string> auc_rows;
  const auto add_row = [&](const std::string& method, double value, double se,
                           const std::string& flags) {
    auc_rows.push_back(method + "," + arm_label + "," + format_double(config.horizon) + "," +
                       format_double(value) + "," + format_double(se) + "," + flags);
  };
  add_row("noninformative", auc_parametric(best.kind, best.params, config.horizon),
          auc_delta_se(best, config.horizon), "model=" + to_string(best.kind) + ";se=delta");
  if (blended_best) {
    add_row("registry_blend",
            auc_parametric(blended_best->kind, blended_best->params, config.horizon),
            auc_delta_se(*blended_best, config.horizon),
            "model=" + to_string(blended_best->kind) + ";join=" + format_double(join) +
                ";se=delta");
  }
  if (power_row) {
    add_row("power_prior_alpha" + format_double(*power_row->alpha), power_row->auc.value,
            power_row->auc.se,
            "model=" + to_string(power_row->kind) + ";se=posterior-sd");
  }
  if (power_registry_row) {
    add_row("power_prior_alpha" + format_double(*power_registry_row->alpha) + "_registry",
            power_registry_row->auc.value, power_registry_row->auc.se,
            "model=" + to_string(power_registry_row->kind) +
                ";alpha0=" + format_double(alpha0_eff) + ";se=posterior-sd");
  }
  add_row("bma", bma_rct.auc.mean, bma_rct.auc.sd,
          "scheme=" + to_string(bma_rct.weights.scheme) + ";se=posterior-sd");
  if (bma_registry) {
    add_row("bma_registry", bma_registry->auc.mean, bma_registry->auc.sd,
            "scheme=" + to_string(bma_registry->weights.scheme) +
                ";alpha0=" + format_double(alpha0_eff) + ";se=posterior-sd");
  }
  write_table(out_file(config, "auc_report.csv"), config.output_header("report"),
              "method,arm,horizon,auc,se,flags", auc_rows);

  // --- overlay plot
  SvgPlot plot(config.horizon, "Survival extrapolation (" + arm_label + ")");
  plot.add_step_curve(km, "product-limit", "#1f6fb2");
  if (blended) {
    plot.add_step_curve(kaplan_meier(*blended), "blended product-limit", "#7a4fb0");
  }
  const SurvivalCurve best_curve = extrapolate(best, grid);
  plot.add_line_curve(best_curve.times, best_curve.survival,
                      "best fit (" + to_string(best.kind) + ")", "#d1492e");
  plot.add_line_curve(bma_rct.curve.times, bma_rct.curve.survival, "model average", "#2e8540",
                      true);
  if (config.has_anchor()) {
    const LongTermAnchor anchor = config.anchor_or_throw();
    plot.add_anchor_tick(anchor.t_obs, anchor.s_obs,
                         "anchor " + format_double(anchor.s_obs) + " @ " +
                             format_double(anchor.t_obs));
  }
  plot.write(out_file(config, "report.svg").string(), config.output_header("report"));
}

}  // namespace survx
