#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "survx/bayes.hpp"
#include "survx/parametric.hpp"

using namespace survx;

namespace {

Dataset pooled(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.records.insert(out.records.end(), b.records.begin(), b.records.end());
  return out;
}

ModelParams ln_params(double meanlog, double sdlog) {
  ModelParams p;
  p.meanlog = meanlog;
  p.sdlog = sdlog;
  return p;
}

McmcConfig quick_config(std::uint64_t seed = 9) {
  McmcConfig config;
  config.chains = 2;
  config.warmup = 500;
  config.kept = 500;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_CASE("power prior at full weight equals the pooled-data posterior") {
  const Dataset current = testutil::weibull_ipd(50, 301);
  const Dataset historical = testutil::weibull_ipd(50, 302, 0.05, 1.1);
  PowerPriorSpec spec;
  spec.historical = historical;
  spec.alpha0 = 1.0;
  const PowerPriorSpec plain;
  const Dataset both = pooled(current, historical);
  const PriorSpec priors;

  Rng rng(99, 1);
  for (int i = 0; i < 25; ++i) {
    const ModelParams theta = ln_params(2.0 + rng.normal(), std::exp(0.3 * rng.normal()));
    const double with_power =
        log_posterior(ModelKind::lognormal, theta, current, spec, priors);
    const double with_pool = log_posterior(ModelKind::lognormal, theta, both, plain, priors);
    CHECK(std::abs(with_power - with_pool) < 1e-12 * std::max(1.0, std::abs(with_pool)));
  }
}

TEST_CASE("power prior at zero weight ignores the historical data") {
  const Dataset current = testutil::weibull_ipd(40, 303);
  PowerPriorSpec spec;
  spec.historical = testutil::weibull_ipd(60, 304);
  spec.alpha0 = 0.0;
  const PowerPriorSpec plain;
  const PriorSpec priors;
  Rng rng(98, 1);
  for (int i = 0; i < 25; ++i) {
    const ModelParams theta = ln_params(2.0 + rng.normal(), std::exp(0.3 * rng.normal()));
    CHECK(log_posterior(ModelKind::lognormal, theta, current, spec, priors) ==
          log_posterior(ModelKind::lognormal, theta, current, plain, priors));
  }
}

TEST_CASE("fractional power scales the historical log likelihood linearly") {
  const Dataset current = testutil::weibull_ipd(40, 305);
  const Dataset historical = testutil::weibull_ipd(30, 306);
  PowerPriorSpec spec;
  spec.historical = historical;
  spec.alpha0 = 0.5;
  const PowerPriorSpec plain;
  const PriorSpec priors;
  const ModelParams theta = ln_params(3.0, 0.9);
  const double diff = log_posterior(ModelKind::lognormal, theta, current, spec, priors) -
                      log_posterior(ModelKind::lognormal, theta, current, plain, priors);
  CHECK(diff == doctest::Approx(0.5 * log_likelihood(ModelKind::lognormal, theta, historical))
                    .epsilon(1e-12));
}

TEST_CASE("the anchor adds a Gaussian log density with tempered precision") {
  // log-logistic with rate 0.05, shape 2 has S(20) = 0.5 exactly, so the
  // anchor contribution has a closed form.
  const Dataset current = testutil::weibull_ipd(40, 307);
  ModelParams theta;
  theta.rate = 0.05;
  theta.shape = 2.0;
  const PriorSpec priors;
  const PowerPriorSpec plain;

  LongTermAnchor anchor;
  anchor.t_obs = 20.0;
  anchor.s_obs = 0.35;
  anchor.var_obs = 0.01;
  anchor.alpha = 1.0;
  PowerPriorSpec anchored;
  anchored.anchor = anchor;
  const double base = log_posterior(ModelKind::loglogistic, theta, current, plain, priors);
  const double at1 = log_posterior(ModelKind::loglogistic, theta, current, anchored, priors);
  CHECK(at1 - base == doctest::Approx(0.258646559789373).epsilon(1e-11));

  anchored.anchor->alpha = 2.0;  // precision (1/var)^2
  const double at2 = log_posterior(ModelKind::loglogistic, theta, current, anchored, priors);
  CHECK(at2 - base == doctest::Approx(-108.81376834721661).epsilon(1e-11));
}

TEST_CASE("log_posterior_u includes the change-of-variables Jacobian") {
  const Dataset current = testutil::weibull_ipd(30, 308);
  const PriorSpec priors;
  const PowerPriorSpec plain;
  const ModelParams theta = ln_params(2.5, 0.7);
  const std::vector<double> u = to_unconstrained(ModelKind::lognormal, theta);
  const double direct = log_posterior(ModelKind::lognormal, theta, current, plain, priors);
  const double on_u = log_posterior_u(ModelKind::lognormal, u, current, plain, priors);
  // the sampler walks on u = (meanlog, log sdlog); the prior's positive
  // coordinate is tau = 1/sdlog, so the log Jacobian is log tau
  CHECK(on_u - direct == doctest::Approx(std::log(1.0 / theta.sdlog)).epsilon(1e-10));
}

TEST_CASE("dic combines mean deviance and the effective parameter count") {
  PosteriorSample sample;
  sample.deviance_draws = {10.0, 12.0};
  sample.deviance_at_mean_u = 9.0;
  // mean deviance 11, pd = 11 - 9 = 2, dic = 13
  CHECK(dic(sample) == doctest::Approx(13.0).epsilon(1e-14));
}

TEST_CASE("sample_posterior is reproducible and self-consistent") {
  const Dataset data = testutil::weibull_ipd(60, 309);
  const PowerPriorSpec plain;
  const PriorSpec priors;
  const PosteriorSample a =
      sample_posterior(ModelKind::lognormal, data, plain, priors, quick_config());
  const PosteriorSample b =
      sample_posterior(ModelKind::lognormal, data, plain, priors, quick_config());
  REQUIRE(a.draws_u.size() == 1000);
  REQUIRE(a.draws.size() == a.draws_u.size());
  for (std::size_t i = 0; i < a.draws_u.size(); ++i) {
    CHECK(a.draws_u[i] == b.draws_u[i]);
  }
  // deviance draws are -2 log L of the current data at the draw
  const std::size_t mid = a.draws.size() / 2;
  CHECK(a.deviance_draws[mid] ==
        doctest::Approx(-2.0 * log_likelihood(ModelKind::lognormal, a.draws[mid], data))
            .epsilon(1e-10));
  CHECK(a.dic == doctest::Approx(dic(a)).epsilon(1e-12));
  CHECK(a.pd > 0.0);
  for (const ModelParams& p : a.draws) CHECK(p.sdlog > 0.0);
  CHECK(a.acceptance_rate > 0.05);
  CHECK(a.acceptance_rate < 0.8);
}

TEST_CASE("constrained_fit tracks the anchor as the power rises") {
  const Dataset data = testutil::weibull_ipd(80, 310, 0.03, 1.2, 30.0, 0.01);
  LongTermAnchor anchor;
  anchor.t_obs = 60.0;
  anchor.s_obs = 0.30;
  anchor.var_obs = 0.01;
  const std::vector<double> alphas{0.001, 2.0};
  const std::vector<ConstrainedFit> fits = constrained_fit(
      ModelKind::lognormal, data, anchor, alphas, PriorSpec{}, quick_config(21), 72.0);
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].alpha == 0.001);
  CHECK(fits[1].alpha == 2.0);
  CHECK(std::abs(fits[1].anchor_survival_mean - 0.30) <
        std::abs(fits[0].anchor_survival_mean - 0.30));
  CHECK(fits[1].anchor_survival_sd < fits[0].anchor_survival_sd);
  for (const ConstrainedFit& fit : fits) {
    CHECK(fit.auc_mean > 0.0);
    CHECK(fit.auc_mean < 72.0);
    CHECK(fit.auc_sd > 0.0);
  }
}

TEST_CASE("write_draws_csv emits one row per kept draw") {
  const Dataset data = testutil::weibull_ipd(40, 311);
  McmcConfig config = quick_config();
  config.warmup = 200;
  config.kept = 50;
  const PosteriorSample sample =
      sample_posterior(ModelKind::lognormal, data, PowerPriorSpec{}, PriorSpec{}, config);
  const auto path = std::filesystem::temp_directory_path() / "survx_draws.csv";
  write_draws_csv(path.string(), sample, "survx test");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# survx test");
  std::getline(in, line);
  CHECK(line == "chain,iter,meanlog,sdlog,deviance");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 100);
  std::filesystem::remove(path);
}
