#pragma once

#include <optional>
#include <span>
#include <vector>

#include "survx/km.hpp"

namespace survx {

/// Local linear kernel regression of survival on time, trained on the step
/// points of an estimated curve.
struct LocalLinearModel {
  std::vector<double> times;
  std::vector<double> survival;
  double bandwidth = 0.0;  // Gaussian kernel scale
};

/// Geometric bandwidth grid from the minimum point spacing up to the full
/// time range.
std::vector<double> bandwidth_grid(std::span<const double> times, int size = 25);

/// Leave-one-out cross-validation squared error at one bandwidth.
double cv_error(std::span<const double> times, std::span<const double> survival,
                double bandwidth);

/// Fits the smoother. Without an explicit bandwidth, picks the grid bandwidth
/// minimizing leave-one-out error (first minimizer on ties).
LocalLinearModel fit_local_linear(const SurvivalCurve& curve,
                                  std::optional<double> bandwidth = std::nullopt);

/// Weighted local line at t, clamped to [0, 1]. Beyond the last knot (and
/// before the first) the local line fitted at the boundary knot is continued,
/// so extrapolation is linear.
double predict(const LocalLinearModel& model, double t);

/// -2 log likelihood under a Gaussian kernel conditional-density estimate of
/// survival given time, using the model bandwidth on both axes. Decreases as
/// the bandwidth shrinks toward the point spacing.
double minus2_log_likelihood(const LocalLinearModel& model);

/// Least-squares projection onto the closest non-increasing sequence
/// (pool-adjacent-violators). Optional post-processing for predicted curves;
/// never applied unless asked for.
std::vector<double> isotonic_decreasing(std::span<const double> values);

}  // namespace survx
