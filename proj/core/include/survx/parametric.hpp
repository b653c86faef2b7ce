#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "survx/km.hpp"
#include "survx/types.hpp"

namespace survx {

enum class ModelKind { exponential, weibull, lognormal, loglogistic, gompertz };

constexpr std::array<ModelKind, 5> all_model_kinds() {
  return {ModelKind::exponential, ModelKind::weibull, ModelKind::lognormal,
          ModelKind::loglogistic, ModelKind::gompertz};
}

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Which fields are live depends on the model:
///   exponential            rate
///   weibull, log-logistic  rate, shape (both > 0)
///   gompertz               rate > 0, shape any real (shape < 0 gives a
///                          defective distribution with a survival plateau)
///   lognormal              meanlog, sdlog (> 0)
struct ModelParams {
  double rate = 0.0;
  double shape = 0.0;
  double meanlog = 0.0;
  double sdlog = 0.0;
};

int free_param_count(ModelKind kind);
std::vector<std::string> param_names(ModelKind kind);
void validate_params(ModelKind kind, const ModelParams& params);

/// Positive parameters are optimized and sampled on the log scale; gompertz
/// shape and lognormal meanlog stay on the identity scale.
std::vector<double> to_unconstrained(ModelKind kind, const ModelParams& params);
ModelParams from_unconstrained(ModelKind kind, std::span<const double> u);

double survival(ModelKind kind, const ModelParams& params, double t);
double hazard(ModelKind kind, const ModelParams& params, double t);
double log_density(ModelKind kind, const ModelParams& params, double t);
double log_survival(ModelKind kind, const ModelParams& params, double t);

/// Right-censored, left-truncated log likelihood:
/// sum over events of log f + sum over censored of log S - sum of log S(entry).
/// Returns -inf (never throws) when parameters leave the valid domain.
double log_likelihood(ModelKind kind, const ModelParams& params, const Dataset& data);

/// Symmetric matrix over the unconstrained parameters, dim <= 2.
struct SymmetricMatrix {
  int dim = 0;
  std::array<double, 4> values{};  // row-major

  double at(int i, int j) const { return values[static_cast<std::size_t>(i * dim + j)]; }
};

struct ParametricFit {
  ModelKind kind = ModelKind::exponential;
  ModelParams params;
  double minus2_loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  SymmetricMatrix covariance;  // over unconstrained parameters
  std::size_t n = 0;
  bool converged = false;
};

/// Maximum likelihood fit. The exponential rate has a closed form; the other
/// models run a Nelder-Mead simplex from three deterministic starts
/// (moment-based, median-based, unit) and keep the best optimum. The
/// covariance is the inverse of the numerically differentiated negative
/// Hessian at the optimum.
ParametricFit fit_mle(ModelKind kind, const Dataset& data);

/// Model survival over an arbitrary time grid with delta-method standard
/// errors propagated from the fit covariance.
SurvivalCurve extrapolate(const ParametricFit& fit, std::span<const double> grid);

}  // namespace survx
