#pragma once

#include <span>

#include "survx/bayes.hpp"
#include "survx/km.hpp"
#include "survx/parametric.hpp"

namespace survx {

/// Area under the survival curve restricted to [0, horizon] (mean survival
/// time up to the horizon).
struct RestrictedAuc {
  double horizon = 0.0;
  double value = 0.0;
  double se = 0.0;
  bool carried_forward = false;  // curve ended before the horizon
};

/// Exact step-function integral. For product-limit curves the SE is the
/// restricted-mean Greenwood variance; when the curve ends before the horizon
/// its last value is carried forward and the result is flagged.
RestrictedAuc auc_step(const SurvivalCurve& curve, double horizon);

/// Adaptive quadrature of model survival on [0, horizon], absolute tolerance
/// 1e-8.
double auc_parametric(ModelKind kind, const ModelParams& params, double horizon);

/// Posterior restricted AUC: value is the mean and se the SD over per-draw
/// quadrature results.
RestrictedAuc auc_posterior(const PosteriorSample& sample, double horizon);

/// Delta-method SE of the parametric AUC from the fit covariance, with a
/// numerically differentiated gradient.
double auc_delta_se(const ParametricFit& fit, double horizon);

}  // namespace survx
