// survx — survival extrapolation toolkit command line.
//
// Every subcommand reads an optional key=value configuration file first and
// then overlays any flags given on the command line, so a run is fully
// described by (config file, flags, seed) and is byte-for-byte reproducible.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "survx/pipeline.hpp"

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  // flag spelling -> configuration key; values are routed through the same
  // parser the config file uses so both layers validate identically.
  std::vector<std::pair<std::string, std::string>> value_flags;
  std::vector<std::pair<std::string, std::string>> bool_flags;
  void (*run)(const survx::RunConfig&) = nullptr;
  std::string name;
};

void add_value(Subcommand& sub, const std::string& flag, const std::string& key,
               const std::string& help, bool repeatable = false) {
  CLI::Option* opt = sub.app->add_option(flag, help);
  if (repeatable) opt->take_all();
  sub.value_flags.emplace_back(flag, key);
}

void add_bool(Subcommand& sub, const std::string& flag, const std::string& key,
              const std::string& help) {
  sub.app->add_flag(flag, help);
  sub.bool_flags.emplace_back(flag, key);
}

void add_common(Subcommand& sub) {
  sub.app->add_option("--config", sub.config_path, "key=value configuration file");
  add_value(sub, "--out", "out", "output directory (default '.')");
  add_value(sub, "--seed", "seed", "random seed recorded in every output");
}

void add_data_options(Subcommand& sub) {
  add_value(sub, "--input", "input", "trial IPD CSV (id,time,event,arm[,entry_time])");
  add_value(sub, "--arm", "arm", "restrict to one arm (soc | experimental)");
  add_value(sub, "--trim", "trim", "fraction of follow-up to cut from the tail, in [0,1)");
  add_value(sub, "--trim-mode", "trim_mode", "what trimming does to late records "
                                             "(recensor | drop)");
}

void add_horizon_options(Subcommand& sub) {
  add_value(sub, "--horizon", "horizon", "extrapolation horizon in months (default 72)");
  add_value(sub, "--grid-step", "grid_step", "output grid spacing in months (default 1)");
}

void add_mcmc_options(Subcommand& sub) {
  add_value(sub, "--chains", "chains", "number of MCMC chains (default 4)");
  add_value(sub, "--warmup", "warmup", "warmup iterations per chain (default 5000)");
  add_value(sub, "--kept", "kept", "kept iterations per chain (default 5000)");
  add_value(sub, "--thin", "thin", "keep every thin-th draw (default 1)");
  add_value(sub, "--bayes-kind", "bayes_kind",
            "posterior model(s): lognormal | loglogistic | both");
  add_value(sub, "--historical", "historical", "historical IPD CSV for the power prior");
  add_value(sub, "--alpha0", "alpha0", "power applied to the historical likelihood, in [0,2]");
}

void add_anchor_options(Subcommand& sub) {
  add_value(sub, "--alpha", "alpha", "anchor power grid value (repeatable)", true);
  add_value(sub, "--anchor-t", "anchor_t", "anchor time point (months)");
  add_value(sub, "--anchor-s", "anchor_s", "anchor survival probability");
  add_value(sub, "--anchor-var", "anchor_var", "anchor variance");
}

void add_registry_options(Subcommand& sub) {
  add_value(sub, "--join", "join", "time where registry follow-up takes over");
  add_value(sub, "--registry-ipd", "registry_ipd", "registry IPD CSV");
  add_value(sub, "--registry-lifetable", "registry_lifetable", "registry life-table CSV");
}

survx::RunConfig build_config(const Subcommand& sub) {
  survx::RunConfig config;
  if (!sub.config_path.empty()) {
    for (const auto& [key, value] : survx::load_config_file(sub.config_path)) {
      survx::apply_config_entry(config, key, value);
    }
  }
  for (const auto& [flag, key] : sub.value_flags) {
    const CLI::Option* opt = sub.app->get_option(flag);
    if (opt->count() == 0) continue;
    std::string joined;
    for (const std::string& part : opt->results()) {
      if (!joined.empty()) joined += ",";
      joined += part;
    }
    survx::apply_config_entry(config, key, joined);
  }
  for (const auto& [flag, key] : sub.bool_flags) {
    if (sub.app->get_option(flag)->count() > 0) {
      survx::apply_config_entry(config, key, "true");
    }
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survx — survival curve fitting, reconstruction and extrapolation"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Subcommand>> subs;

  auto make = [&](const std::string& name, const std::string& help,
                  void (*run)(const survx::RunConfig&)) -> Subcommand& {
    auto sub = std::make_unique<Subcommand>();
    sub->app = app.add_subcommand(name, help);
    sub->run = run;
    sub->name = name;
    add_common(*sub);
    subs.push_back(std::move(sub));
    return *subs.back();
  };

  Subcommand& km = make("km", "product-limit curve and life table from IPD", survx::run_km);
  add_data_options(km);
  add_value(km, "--lifetable-width", "lifetable_width", "life-table interval width (months)");

  Subcommand& fit = make("fit", "maximum-likelihood fits and extrapolated curves",
                         survx::run_fit);
  add_data_options(fit);
  add_horizon_options(fit);
  add_value(fit, "--models", "models", "comma list: exponential,weibull,lognormal,"
                                       "loglogistic,gompertz");
  add_bool(fit, "--isotonic", "isotonic", "force the smoothed curve to be non-increasing");

  Subcommand& reconstruct = make("reconstruct", "IPD from a published curve or life table",
                                 survx::run_reconstruct);
  add_value(reconstruct, "--curve", "curve", "digitized curve CSV (time,survival)");
  add_value(reconstruct, "--risk", "risk", "at-risk table CSV (time,n_risk[,total_events])");
  add_value(reconstruct, "--lifetable", "lifetable", "published life-table CSV");
  add_value(reconstruct, "--arm", "arm", "arm label for the reconstructed records");

  Subcommand& blend = make("blend", "splice trial follow-up with registry follow-up",
                           survx::run_blend);
  add_data_options(blend);
  add_registry_options(blend);

  Subcommand& bayes = make("bayes", "posterior sampling with power prior and anchor",
                           survx::run_bayes);
  add_data_options(bayes);
  add_value(bayes, "--horizon", "horizon", "extrapolation horizon in months (default 72)");
  add_mcmc_options(bayes);
  add_anchor_options(bayes);

  Subcommand& bma = make("bma", "model-averaged posterior curve", survx::run_bma);
  add_data_options(bma);
  add_horizon_options(bma);
  add_mcmc_options(bma);
  add_value(bma, "--scheme", "scheme", "weighting scheme: dic | auc | location");
  add_bool(bma, "--raw-inverse-dic", "raw_inverse_dic", "weight by 1/DIC instead of "
                                                        "exp(-delta DIC / 2)");

  Subcommand& report = make("report", "full extrapolation report on one dataset",
                            survx::run_report);
  add_data_options(report);
  add_horizon_options(report);
  add_registry_options(report);
  add_mcmc_options(report);
  add_anchor_options(report);
  add_value(report, "--models", "models",
            "comma list of parametric models to fit, or 'none' for a "
            "product-limit-only report");
  add_value(report, "--scheme", "scheme", "weighting scheme: dic | auc | location");
  add_value(report, "--lifetable-width", "lifetable_width", "life-table interval width");
  add_bool(report, "--raw-inverse-dic", "raw_inverse_dic", "weight by 1/DIC");
  add_bool(report, "--isotonic", "isotonic", "force the smoothed curve to be non-increasing");

  try {
    app.parse(argc, argv);
    for (const auto& sub : subs) {
      if (sub->app->parsed()) {
        sub->run(build_config(*sub));
        return 0;
      }
    }
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const survx::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
