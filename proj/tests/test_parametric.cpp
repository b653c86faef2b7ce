#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "survx/parametric.hpp"

using namespace survx;
using testutil::make_dataset;

namespace {

ModelParams exp_params(double rate) {
  ModelParams p;
  p.rate = rate;
  return p;
}

ModelParams two_params(double rate, double shape) {
  ModelParams p;
  p.rate = rate;
  p.shape = shape;
  return p;
}

ModelParams ln_params(double meanlog, double sdlog) {
  ModelParams p;
  p.meanlog = meanlog;
  p.sdlog = sdlog;
  return p;
}

}  // namespace

TEST_CASE("exponential survival, hazard and density") {
  const ModelParams p = exp_params(0.1);
  CHECK(survival(ModelKind::exponential, p, 10.0) ==
        doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(hazard(ModelKind::exponential, p, 10.0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(log_density(ModelKind::exponential, p, 10.0) ==
        doctest::Approx(std::log(0.1) - 1.0).epsilon(1e-14));
  CHECK(survival(ModelKind::exponential, p, 0.0) == 1.0);
}

TEST_CASE("weibull survival and density at a frozen point") {
  const ModelParams p = two_params(0.1, 2.0);
  // (rate*t)^shape = 0.25 at t=5; hazard = shape*rate*(rate*t)^(shape-1) = 0.1
  CHECK(survival(ModelKind::weibull, p, 5.0) ==
        doctest::Approx(0.7788007830714049).epsilon(1e-14));
  CHECK(hazard(ModelKind::weibull, p, 5.0) == doctest::Approx(0.1).epsilon(1e-13));
  CHECK(log_density(ModelKind::weibull, p, 5.0) ==
        doctest::Approx(-2.5525850929940455).epsilon(1e-13));
}

TEST_CASE("lognormal survival is 1/2 at the median") {
  const ModelParams p = ln_params(std::log(30.0), 1.0);
  CHECK(survival(ModelKind::lognormal, p, 30.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(log_density(ModelKind::lognormal, p, 30.0) ==
        doctest::Approx(-4.320135914866828).epsilon(1e-13));
  // hazard = f / S
  CHECK(hazard(ModelKind::lognormal, p, 30.0) ==
        doctest::Approx(std::exp(-4.320135914866828) / 0.5).epsilon(1e-12));
}

TEST_CASE("loglogistic survival, density, and hazard as f over S") {
  const ModelParams p = two_params(0.05, 2.0);
  // (rate*t)^shape = 1 at t=20 -> S = 0.5, f = 0.025, h = 0.05
  CHECK(survival(ModelKind::loglogistic, p, 20.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(log_density(ModelKind::loglogistic, p, 20.0) ==
        doctest::Approx(-3.6888794541139363).epsilon(1e-13));
  CHECK(hazard(ModelKind::loglogistic, p, 20.0) == doctest::Approx(0.05).epsilon(1e-13));
}

TEST_CASE("gompertz hazard grows exponentially and shape<0 leaves a plateau") {
  const ModelParams p = two_params(0.01, 0.05);
  CHECK(hazard(ModelKind::gompertz, p, 10.0) ==
        doctest::Approx(0.01648721270700128).epsilon(1e-14));
  CHECK(survival(ModelKind::gompertz, p, 10.0) ==
        doctest::Approx(0.8783200289104606).epsilon(1e-13));
  const ModelParams defective = two_params(0.02, -0.1);
  // survival plateau at exp(rate/shape)
  CHECK(survival(ModelKind::gompertz, defective, 1e7) ==
        doctest::Approx(0.8187307530779818).epsilon(1e-12));
}

TEST_CASE("log_likelihood handles censoring and delayed entry") {
  const double lam = 0.3;
  const Dataset mixed = make_dataset({{2, true}, {5, false}});
  CHECK(log_likelihood(ModelKind::exponential, exp_params(lam), mixed) ==
        doctest::Approx(-3.3039728043259364).epsilon(1e-13));
  Dataset entry = make_dataset({{5, true}});
  entry.records[0].entry_time = 3.0;
  CHECK(log_likelihood(ModelKind::exponential, exp_params(lam), entry) ==
        doctest::Approx(-1.803972804325936).epsilon(1e-13));
}

TEST_CASE("log_likelihood is -inf outside the domain, without throwing") {
  const Dataset data = make_dataset({{2, true}});
  CHECK(log_likelihood(ModelKind::weibull, two_params(-1.0, 2.0), data) ==
        -std::numeric_limits<double>::infinity());
  CHECK(log_likelihood(ModelKind::lognormal, ln_params(0.0, -1.0), data) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("unconstrained transform round-trips for every model") {
  const std::vector<std::pair<ModelKind, ModelParams>> cases = {
      {ModelKind::exponential, exp_params(0.07)},
      {ModelKind::weibull, two_params(0.03, 1.4)},
      {ModelKind::loglogistic, two_params(0.05, 2.2)},
      {ModelKind::gompertz, two_params(0.02, -0.04)},
      {ModelKind::lognormal, ln_params(3.1, 0.8)},
  };
  for (const auto& [kind, params] : cases) {
    const std::vector<double> u = to_unconstrained(kind, params);
    CHECK(static_cast<int>(u.size()) == free_param_count(kind));
    const ModelParams back = from_unconstrained(kind, u);
    CHECK(back.rate == doctest::Approx(params.rate).epsilon(1e-14));
    CHECK(back.shape == doctest::Approx(params.shape).epsilon(1e-14));
    CHECK(back.meanlog == doctest::Approx(params.meanlog).epsilon(1e-14));
    CHECK(back.sdlog == doctest::Approx(params.sdlog).epsilon(1e-14));
  }
}

TEST_CASE("exponential MLE has the closed form events over exposure") {
  const Dataset data = make_dataset({{1, true}, {2, true}, {3, true}, {4, false}});
  const ParametricFit fit = fit_mle(ModelKind::exponential, data);
  CHECK(fit.converged);
  CHECK(fit.params.rate == doctest::Approx(0.3).epsilon(1e-12));
  // -2LL = -2(3 log 0.3 - 3)
  CHECK(fit.minus2_loglik == doctest::Approx(-2.0 * (3.0 * std::log(0.3) - 3.0)).epsilon(1e-12));
  CHECK(fit.aic == doctest::Approx(fit.minus2_loglik + 2.0).epsilon(1e-12));
  CHECK(fit.bic ==
        doctest::Approx(fit.minus2_loglik + std::log(4.0)).epsilon(1e-12));
  CHECK(fit.n == 4);
  // asymptotic var of log-rate is 1/d
  CHECK(fit.covariance.at(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(0.05));
}

TEST_CASE("weibull fixed at shape 1 degenerates to the exponential") {
  const Dataset data = testutil::weibull_ipd(60, 99);
  const ModelParams exp_p = exp_params(0.05);
  const ModelParams wei_p = two_params(0.05, 1.0);
  for (double t : {0.5, 3.0, 17.0, 50.0, 71.9}) {
    CHECK(std::abs(survival(ModelKind::weibull, wei_p, t) -
                   survival(ModelKind::exponential, exp_p, t)) < 1e-12);
    CHECK(std::abs(hazard(ModelKind::weibull, wei_p, t) -
                   hazard(ModelKind::exponential, exp_p, t)) < 1e-12);
  }
  const double ll_w = log_likelihood(ModelKind::weibull, wei_p, data);
  const double ll_e = log_likelihood(ModelKind::exponential, exp_p, data);
  CHECK(std::abs(ll_w - ll_e) < 1e-12 * std::max(1.0, std::abs(ll_e)));
}

TEST_CASE("fit_mle beats the generating parameters on every model") {
  // the MLE cannot have a worse in-sample likelihood than the truth
  const Dataset data = testutil::weibull_ipd(300, 424242, 0.03, 1.3, 45.0, 0.005);
  for (ModelKind kind : all_model_kinds()) {
    const ParametricFit fit = fit_mle(kind, data);
    CHECK(fit.converged);
    ModelParams truth;
    switch (kind) {
      case ModelKind::exponential: truth = exp_params(0.03); break;
      case ModelKind::weibull: truth = two_params(0.03, 1.3); break;
      case ModelKind::loglogistic: truth = two_params(0.035, 1.6); break;
      case ModelKind::gompertz: truth = two_params(0.02, 0.01); break;
      case ModelKind::lognormal: truth = ln_params(3.4, 1.0); break;
    }
    const double ll_fit = log_likelihood(kind, fit.params, data);
    const double ll_truth = log_likelihood(kind, truth, data);
    CHECK(ll_fit >= ll_truth - 1e-9);
    CHECK(fit.minus2_loglik == doctest::Approx(-2.0 * ll_fit).epsilon(1e-10));
    CHECK(fit.aic == doctest::Approx(fit.minus2_loglik + 2.0 * free_param_count(kind))
                         .epsilon(1e-12));
  }
}

TEST_CASE("weibull MLE recovers generating parameters on a large sample") {
  const Dataset data = testutil::weibull_ipd(4000, 77, 0.03, 1.25, 80.0, 0.002);
  const ParametricFit fit = fit_mle(ModelKind::weibull, data);
  CHECK(fit.converged);
  CHECK(fit.params.rate == doctest::Approx(0.03).epsilon(0.08));
  CHECK(fit.params.shape == doctest::Approx(1.25).epsilon(0.08));
}

TEST_CASE("extrapolate returns model survival with delta-method uncertainty") {
  const Dataset data = testutil::weibull_ipd(200, 11);
  const ParametricFit fit = fit_mle(ModelKind::exponential, data);
  const std::vector<double> grid{0.0, 6.0, 12.0, 72.0};
  const SurvivalCurve curve = extrapolate(fit, grid);
  REQUIRE(curve.times == grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(curve.survival[i] ==
          doctest::Approx(survival(ModelKind::exponential, fit.params, grid[i]))
              .epsilon(1e-12));
    CHECK(curve.survival[i] >= 0.0);
    CHECK(curve.survival[i] <= 1.0);
    if (grid[i] > 0.0) CHECK(curve.se[i] > 0.0);
  }
  CHECK(curve.se[0] == 0.0);  // survival is pinned to 1 at t = 0
}

TEST_CASE("param_names and free_param_count agree") {
  for (ModelKind kind : all_model_kinds()) {
    CHECK(static_cast<int>(param_names(kind).size()) == free_param_count(kind));
  }
  CHECK(param_names(ModelKind::exponential) == std::vector<std::string>{"rate"});
  CHECK(param_names(ModelKind::lognormal) == std::vector<std::string>{"meanlog", "sdlog"});
}

TEST_CASE("model names round-trip through the parser") {
  for (ModelKind kind : all_model_kinds()) {
    CHECK(parse_model_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS(parse_model_kind("cubic-spline"));
}
