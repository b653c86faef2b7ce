#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace survx {

struct McmcConfig {
  int chains = 4;
  int warmup = 5000;
  int kept = 5000;  // post-warmup draws kept per chain
  int thin = 1;
  std::uint64_t seed = 1;
};

void validate_mcmc_config(const McmcConfig& config);

/// Draws from one random-walk Metropolis run. Draws are stored chain-major:
/// all of chain 0's kept draws, then chain 1's, and so on.
struct McmcRun {
  int dim = 0;
  int chains = 0;
  int kept_per_chain = 0;
  std::vector<std::vector<double>> draws;
  std::vector<int> chain_index;
  double acceptance_rate = 0.0;  // post-warmup, pooled over chains
  std::vector<double> rhat;      // split-Rhat per coordinate
  std::vector<double> ess;       // effective sample size per coordinate
  bool converged = false;        // all rhat <= 1.05
};

/// Random-walk Metropolis with a per-chain step scale adapted toward a
/// 0.25-0.45 acceptance rate during warm-up and frozen afterwards. Each chain
/// draws from an independent stream derived from (seed, chain index), and
/// chains start from `init` plus a deterministic per-chain jitter, so a given
/// seed reproduces bit-identically.
McmcRun run_random_walk(const std::function<double(std::span<const double>)>& log_target,
                        std::span<const double> init, const McmcConfig& config);

/// Split-Rhat over per-chain series of equal length (each chain is halved, so
/// non-stationarity within a chain also inflates the statistic).
double split_rhat(const std::vector<std::vector<double>>& chain_series);

/// Effective sample size across chains via Geyer's initial positive sequence.
double effective_sample_size(const std::vector<std::vector<double>>& chain_series);

}  // namespace survx
