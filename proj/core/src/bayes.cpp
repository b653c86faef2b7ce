#include "survx/bayes.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "survx/csv.hpp"
#include "survx/metrics.hpp"
#include "survx/numerics.hpp"

namespace survx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_kind(ModelKind kind) {
  if (kind != ModelKind::lognormal && kind != ModelKind::loglogistic) {
    throw std::invalid_argument("bayes: only lognormal and loglogistic posteriors are supported");
  }
}

void check_priors(const PriorSpec& priors) {
  if (!(priors.location_precision > 0.0) || !(priors.tau_shape > 0.0) ||
      !(priors.tau_rate > 0.0)) {
    throw std::invalid_argument("bayes: prior precision, shape and rate must all be > 0");
  }
}

void check_spec(const PowerPriorSpec& spec) {
  if (!(spec.alpha0 >= 0.0 && spec.alpha0 <= 2.0)) {
    throw std::invalid_argument("bayes: alpha0 must lie in [0, 2]");
  }
  if (spec.alpha0 > 0.0 && spec.historical.empty()) {
    throw std::invalid_argument("bayes: alpha0 > 0 requires historical data");
  }
  if (spec.anchor) validate_anchor(*spec.anchor);
}

// The prior lives on (location, tau): location is the log-time location
// (meanlog for the lognormal, log rate for the log-logistic, symmetric about
// 0 either way) with a normal prior in the precision convention, and tau is
// the positive parameter (1/sdlog, or the log-logistic shape) with a gamma
// prior.
struct LocationTau {
  double location;
  double tau;
};

LocationTau location_tau(ModelKind kind, const ModelParams& p) {
  if (kind == ModelKind::lognormal) return {p.meanlog, 1.0 / p.sdlog};
  return {std::log(p.rate), p.shape};
}

double log_prior(ModelKind kind, const ModelParams& p, const PriorSpec& priors) {
  const auto [location, tau] = location_tau(kind, p);
  if (!(tau > 0.0) || !std::isfinite(location)) return -kInf;
  const double prec = priors.location_precision;
  const double log_normal = 0.5 * std::log(prec) - 0.5 * std::log(2.0 * std::numbers::pi) -
                            0.5 * prec * (location - priors.location_mean) *
                                (location - priors.location_mean);
  const double a = priors.tau_shape, b = priors.tau_rate;
  const double log_gamma_pdf =
      a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(tau) - b * tau;
  return log_normal + log_gamma_pdf;
}

double anchor_log_density(ModelKind kind, const ModelParams& p, const LongTermAnchor& anchor) {
  const double s_model = survival(kind, p, anchor.t_obs);
  const double precision = std::pow(1.0 / anchor.var_obs, anchor.alpha);
  const double resid = s_model - anchor.s_obs;
  return 0.5 * std::log(precision) - 0.5 * std::log(2.0 * std::numbers::pi) -
         0.5 * precision * resid * resid;
}

}  // namespace

double log_posterior(ModelKind kind, const ModelParams& params, const Dataset& current,
                     const PowerPriorSpec& spec, const PriorSpec& priors) {
  check_kind(kind);
  check_priors(priors);
  check_spec(spec);
  if (current.empty()) throw std::invalid_argument("bayes: empty current dataset");

  const double prior = log_prior(kind, params, priors);
  if (prior == -kInf) return -kInf;
  double total = prior;
  if (spec.alpha0 > 0.0 && !spec.historical.empty()) {
    const double hist = log_likelihood(kind, params, spec.historical);
    if (hist == -kInf) return -kInf;
    total += spec.alpha0 * hist;
  }
  const double lik = log_likelihood(kind, params, current);
  if (lik == -kInf) return -kInf;
  total += lik;
  if (spec.anchor) total += anchor_log_density(kind, params, *spec.anchor);
  return total;
}

double log_posterior_u(ModelKind kind, std::span<const double> u, const Dataset& current,
                       const PowerPriorSpec& spec, const PriorSpec& priors) {
  check_kind(kind);
  if (u.size() != 2 || !std::isfinite(u[0]) || !std::isfinite(u[1])) return -kInf;
  const ModelParams p = from_unconstrained(kind, u);
  if (!(p.sdlog > 0.0) && kind == ModelKind::lognormal) return -kInf;
  // Jacobian of tau with respect to the sampled coordinate: tau = exp(-u1)
  // for the lognormal (u1 = log sdlog) and exp(u1) for the log-logistic; in
  // both cases log|dtau/du1| = log tau. The location coordinate is identity.
  const double tau = kind == ModelKind::lognormal ? 1.0 / p.sdlog : p.shape;
  if (!(tau > 0.0)) return -kInf;
  const double base = log_posterior(kind, p, current, spec, priors);
  if (base == -kInf) return -kInf;
  return base + std::log(tau);
}

PosteriorSample sample_posterior(ModelKind kind, const Dataset& current,
                                 const PowerPriorSpec& spec, const PriorSpec& priors,
                                 const McmcConfig& config) {
  check_kind(kind);
  check_priors(priors);
  check_spec(spec);
  validate_mcmc_config(config);
  if (current.empty()) throw std::invalid_argument("bayes: empty current dataset");
  if (current.event_count() == 0) {
    throw std::invalid_argument("bayes: current dataset has no events");
  }

  const ParametricFit init_fit = fit_mle(kind, current);
  const std::vector<double> init_u = to_unconstrained(kind, init_fit.params);

  auto target = [&](std::span<const double> u) {
    return log_posterior_u(kind, u, current, spec, priors);
  };
  const McmcRun run = run_random_walk(target, init_u, config);

  PosteriorSample sample;
  sample.kind = kind;
  sample.chains = config.chains;
  sample.seed = config.seed;
  sample.acceptance_rate = run.acceptance_rate;
  sample.rhat = {run.rhat[0], run.rhat[1]};
  sample.ess = {run.ess[0], run.ess[1]};
  sample.converged = run.converged;
  sample.chain_index = run.chain_index;

  sample.draws_u.reserve(run.draws.size());
  sample.draws.reserve(run.draws.size());
  sample.deviance_draws.reserve(run.draws.size());
  double mean_u0 = 0.0, mean_u1 = 0.0;
  for (const auto& u : run.draws) {
    sample.draws_u.push_back({u[0], u[1]});
    const ModelParams p = from_unconstrained(kind, u);
    sample.draws.push_back(p);
    sample.deviance_draws.push_back(-2.0 * log_likelihood(kind, p, current));
    mean_u0 += u[0];
    mean_u1 += u[1];
  }
  const double n = static_cast<double>(run.draws.size());
  const std::vector<double> u_bar = {mean_u0 / n, mean_u1 / n};
  sample.deviance_at_mean_u =
      -2.0 * log_likelihood(kind, from_unconstrained(kind, u_bar), current);
  sample.dic = dic(sample);
  sample.pd = mean(sample.deviance_draws) - sample.deviance_at_mean_u;
  return sample;
}

double dic(const PosteriorSample& sample) {
  if (sample.deviance_draws.size() < 2) {
    throw std::invalid_argument("dic: need at least two posterior draws");
  }
  const double d_bar = mean(sample.deviance_draws);
  const double pd = d_bar - sample.deviance_at_mean_u;
  return d_bar + pd;
}

std::vector<ConstrainedFit> constrained_fit(ModelKind kind, const Dataset& current,
                                            const LongTermAnchor& anchor,
                                            std::span<const double> alpha_grid,
                                            const PriorSpec& priors, const McmcConfig& config,
                                            double horizon) {
  check_kind(kind);
  validate_anchor(anchor);
  if (alpha_grid.empty()) throw std::invalid_argument("constrained_fit: empty alpha grid");
  for (double a : alpha_grid) {
    if (!(a >= 0.001 && a <= 2.0)) {
      throw std::invalid_argument("constrained_fit: alpha values must lie in [0.001, 2]");
    }
  }

  std::vector<ConstrainedFit> fits;
  fits.reserve(alpha_grid.size());
  for (double a : alpha_grid) {
    PowerPriorSpec spec;
    spec.alpha0 = 0.0;
    spec.anchor = anchor;
    spec.anchor->alpha = a;

    ConstrainedFit fit;
    fit.alpha = a;
    fit.sample = sample_posterior(kind, current, spec, priors, config);

    std::vector<double> s_anchor;
    s_anchor.reserve(fit.sample.draws.size());
    for (const ModelParams& p : fit.sample.draws) {
      s_anchor.push_back(survival(kind, p, anchor.t_obs));
    }
    fit.anchor_survival_mean = mean(s_anchor);
    fit.anchor_survival_sd = sample_sd(s_anchor);

    const RestrictedAuc auc = auc_posterior(fit.sample, horizon);
    fit.auc_mean = auc.value;
    fit.auc_sd = auc.se;
    fits.push_back(std::move(fit));
  }
  return fits;
}

void write_draws_csv(const std::string& path, const PosteriorSample& sample,
                     const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  const auto names = param_names(sample.kind);
  out << "chain,iter";
  for (const auto& name : names) out << ',' << name;
  out << ",deviance\n";
  int iter = 0;
  int last_chain = -1;
  for (std::size_t i = 0; i < sample.draws.size(); ++i) {
    const int chain = sample.chain_index[i];
    iter = chain == last_chain ? iter + 1 : 1;
    last_chain = chain;
    const ModelParams& p = sample.draws[i];
    out << chain << ',' << iter;
    if (sample.kind == ModelKind::lognormal) {
      out << ',' << format_double(p.meanlog) << ',' << format_double(p.sdlog);
    } else {
      out << ',' << format_double(p.rate) << ',' << format_double(p.shape);
    }
    out << ',' << format_double(sample.deviance_draws[i]) << '\n';
  }
}

}  // namespace survx
