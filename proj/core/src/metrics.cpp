#include "survx/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "survx/numerics.hpp"

namespace survx {

RestrictedAuc auc_step(const SurvivalCurve& curve, double horizon) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("auc_step: horizon must be >= 0");
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (i > 0 && !(curve.times[i] > curve.times[i - 1])) {
      throw std::invalid_argument("auc_step: curve times must be strictly increasing");
    }
  }

  RestrictedAuc result;
  result.horizon = horizon;
  result.carried_forward = !curve.times.empty() && curve.times.back() < horizon;

  // Rectangle sum of the right-continuous step function; survival is 1 before
  // the first step.
  double area = 0.0;
  double prev_t = 0.0, prev_s = 1.0;
  std::size_t steps_within = 0;
  for (std::size_t i = 0; i < curve.times.size() && curve.times[i] <= horizon; ++i) {
    area += prev_s * (curve.times[i] - prev_t);
    prev_t = curve.times[i];
    prev_s = curve.survival[i];
    ++steps_within;
  }
  area += prev_s * (horizon - prev_t);
  result.value = area;

  // Restricted-mean Greenwood variance: each event time contributes
  // A(t_j)^2 * d_j / (n_j (n_j - d_j)) with A(t_j) the remaining area.
  if (!curve.events.empty() && curve.events.size() == curve.times.size() &&
      curve.at_risk.size() == curve.times.size()) {
    double area_before = 0.0;
    prev_t = 0.0;
    prev_s = 1.0;
    double variance = 0.0;
    for (std::size_t i = 0; i < steps_within; ++i) {
      area_before += prev_s * (curve.times[i] - prev_t);
      prev_t = curve.times[i];
      prev_s = curve.survival[i];
      const double remaining = area - area_before;
      const double d = curve.events[i];
      const double n = curve.at_risk[i];
      if (n > d && d > 0) {
        variance += remaining * remaining * d / (n * (n - d));
      }
    }
    result.se = std::sqrt(variance);
  }
  return result;
}

double auc_parametric(ModelKind kind, const ModelParams& params, double horizon) {
  validate_params(kind, params);
  if (!(horizon >= 0.0)) throw std::invalid_argument("auc_parametric: horizon must be >= 0");
  if (horizon == 0.0) return 0.0;
  return adaptive_simpson([&](double t) { return survival(kind, params, t); }, 0.0, horizon,
                          1e-8);
}

RestrictedAuc auc_posterior(const PosteriorSample& sample, double horizon) {
  if (sample.draws.empty()) throw std::invalid_argument("auc_posterior: no posterior draws");
  std::vector<double> aucs;
  aucs.reserve(sample.draws.size());
  for (const ModelParams& p : sample.draws) {
    aucs.push_back(auc_parametric(sample.kind, p, horizon));
  }
  RestrictedAuc result;
  result.horizon = horizon;
  result.value = mean(aucs);
  result.se = sample_sd(aucs);
  return result;
}

double auc_delta_se(const ParametricFit& fit, double horizon) {
  const int dim = free_param_count(fit.kind);
  if (fit.covariance.dim != dim) return 0.0;
  const std::vector<double> u_hat = to_unconstrained(fit.kind, fit.params);
  auto auc_of_u = [&](std::span<const double> u) {
    return auc_parametric(fit.kind, from_unconstrained(fit.kind, u), horizon);
  };
  const std::vector<double> g = fd_gradient(auc_of_u, u_hat);
  double var = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      var += g[static_cast<std::size_t>(i)] * fit.covariance.at(i, j) *
             g[static_cast<std::size_t>(j)];
    }
  }
  return var > 0.0 ? std::sqrt(var) : 0.0;
}

}  // namespace survx
