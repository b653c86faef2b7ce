#include "survx/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "survx/numerics.hpp"

namespace survx {

void validate_mcmc_config(const McmcConfig& config) {
  if (config.chains < 1) throw std::invalid_argument("mcmc: chains must be >= 1");
  if (config.warmup < 0) throw std::invalid_argument("mcmc: warmup must be >= 0");
  if (config.kept < 1) throw std::invalid_argument("mcmc: kept draws must be >= 1");
  if (config.thin < 1) throw std::invalid_argument("mcmc: thin must be >= 1");
}

McmcRun run_random_walk(const std::function<double(std::span<const double>)>& log_target,
                        std::span<const double> init, const McmcConfig& config) {
  validate_mcmc_config(config);
  const int dim = static_cast<int>(init.size());
  if (dim == 0) throw std::invalid_argument("mcmc: empty initial point");

  McmcRun run;
  run.dim = dim;
  run.chains = config.chains;
  run.kept_per_chain = config.kept;
  run.draws.reserve(static_cast<std::size_t>(config.chains) * config.kept);
  run.chain_index.reserve(run.draws.capacity());

  long accepted_post = 0, proposed_post = 0;

  for (int chain = 0; chain < config.chains; ++chain) {
    Rng rng(config.seed, static_cast<std::uint64_t>(chain) + 1);

    // Over-dispersed start: deterministic jitter per chain.
    std::vector<double> x(init.begin(), init.end());
    for (double& xi : x) xi += 0.5 * rng.normal();
    double log_p = log_target(x);
    // A jittered start can land outside the support; walk back toward init.
    for (int tries = 0; tries < 32 && !std::isfinite(log_p); ++tries) {
      for (int j = 0; j < dim; ++j) x[static_cast<std::size_t>(j)] = 0.5 * (x[static_cast<std::size_t>(j)] + init[static_cast<std::size_t>(j)]);
      log_p = log_target(x);
    }
    if (!std::isfinite(log_p)) {
      throw std::runtime_error("mcmc: cannot find a valid starting point near the initial value");
    }

    double step = 0.5;  // global proposal scale, adapted during warm-up only
    int batch_accepted = 0, batch_size = 0;
    std::vector<double> proposal(static_cast<std::size_t>(dim));

    const long total_iters =
        static_cast<long>(config.warmup) + static_cast<long>(config.kept) * config.thin;
    long kept_here = 0;
    for (long iter = 0; iter < total_iters; ++iter) {
      const bool warming = iter < config.warmup;
      for (int j = 0; j < dim; ++j) proposal[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)] + step * rng.normal();
      const double log_q = log_target(proposal);
      const bool accept = std::log(rng.uniform()) < log_q - log_p;
      if (accept) {
        x = proposal;
        log_p = log_q;
      }

      if (warming) {
        ++batch_size;
        batch_accepted += accept ? 1 : 0;
        if (batch_size == 50) {
          // Nudge the scale toward a 0.25-0.45 acceptance window.
          const double rate = static_cast<double>(batch_accepted) / 50.0;
          step *= std::exp(0.8 * (rate - 0.35));
          step = std::clamp(step, 1e-4, 50.0);
          batch_size = 0;
          batch_accepted = 0;
        }
      } else {
        ++proposed_post;
        accepted_post += accept ? 1 : 0;
        const long post = iter - config.warmup;
        if ((post + 1) % config.thin == 0 && kept_here < config.kept) {
          run.draws.push_back(x);
          run.chain_index.push_back(chain);
          ++kept_here;
        }
      }
    }
  }

  run.acceptance_rate =
      proposed_post > 0 ? static_cast<double>(accepted_post) / static_cast<double>(proposed_post)
                        : 0.0;

  // Per-coordinate diagnostics over the per-chain kept series.
  run.rhat.resize(static_cast<std::size_t>(dim));
  run.ess.resize(static_cast<std::size_t>(dim));
  run.converged = true;
  for (int j = 0; j < dim; ++j) {
    std::vector<std::vector<double>> series(static_cast<std::size_t>(config.chains));
    for (std::size_t i = 0; i < run.draws.size(); ++i) {
      series[static_cast<std::size_t>(run.chain_index[i])].push_back(run.draws[i][static_cast<std::size_t>(j)]);
    }
    run.rhat[static_cast<std::size_t>(j)] = split_rhat(series);
    run.ess[static_cast<std::size_t>(j)] = effective_sample_size(series);
    if (!(run.rhat[static_cast<std::size_t>(j)] <= 1.05)) run.converged = false;
  }
  return run;
}

double split_rhat(const std::vector<std::vector<double>>& chain_series) {
  // Halve each chain so within-chain drift shows up as between-sequence
  // spread.
  std::vector<std::vector<double>> halves;
  for (const auto& chain : chain_series) {
    const std::size_t n = chain.size();
    if (n < 4) continue;
    const std::size_t half = n / 2;
    halves.emplace_back(chain.begin(), chain.begin() + static_cast<std::ptrdiff_t>(half));
    halves.emplace_back(chain.end() - static_cast<std::ptrdiff_t>(half), chain.end());
  }
  if (halves.size() < 2) return 1.0;

  const std::size_t n = halves.front().size();
  std::vector<double> means, vars;
  for (const auto& h : halves) {
    means.push_back(mean(h));
    vars.push_back(sample_variance(h));
  }
  const double w = mean(vars);
  const double b = static_cast<double>(n) * sample_variance(means);
  if (!(w > 0.0)) return 1.0;  // degenerate (constant) series
  const double var_plus =
      (static_cast<double>(n - 1) / static_cast<double>(n)) * w + b / static_cast<double>(n);
  return std::sqrt(var_plus / w);
}

double effective_sample_size(const std::vector<std::vector<double>>& chain_series) {
  std::vector<const std::vector<double>*> chains;
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& c : chain_series) {
    if (c.size() >= 4) {
      chains.push_back(&c);
      n = std::min(n, c.size());
    }
  }
  if (chains.empty()) return 0.0;
  const std::size_t m = chains.size();

  std::vector<double> chain_means, chain_vars;
  for (const auto* c : chains) {
    std::vector<double> head(c->begin(), c->begin() + static_cast<std::ptrdiff_t>(n));
    chain_means.push_back(mean(head));
    chain_vars.push_back(sample_variance(head));
  }
  const double w = mean(chain_vars);
  const double b = m > 1 ? sample_variance(chain_means) : 0.0;
  const double var_plus =
      (static_cast<double>(n - 1) / static_cast<double>(n)) * w + b;
  if (!(var_plus > 0.0)) return 0.0;

  // Mean autocovariance across chains, folded into Geyer's initial positive
  // sequence of lag-pair sums.
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& xs = *chains[c];
      const double mu = chain_means[c];
      double s = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) s += (xs[i] - mu) * (xs[i + lag] - mu);
      acc += s / static_cast<double>(n);
    }
    return acc / static_cast<double>(m);
  };

  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t lag = 1; lag + 1 < n; lag += 2) {
    const double rho_a = 1.0 - (w - autocov(lag)) / var_plus;
    const double rho_b = 1.0 - (w - autocov(lag + 1)) / var_plus;
    double pair = rho_a + rho_b;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotone decay
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  const double total = static_cast<double>(m) * static_cast<double>(n);
  return std::min(total, total / tau);
}

}  // namespace survx
