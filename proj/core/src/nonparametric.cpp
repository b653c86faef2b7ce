#include "survx/nonparametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "survx/numerics.hpp"

namespace survx {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

double kernel(double u) { return std::exp(-0.5 * u * u); }

/// Weighted least-squares line through (x_j, y_j) evaluated at x = 0; the
/// caller centres the abscissae on the query point. Falls back to the
/// weighted mean when the design is singular and to the nearest point when
/// every weight underflows.
struct LocalLine {
  double intercept = 0.0;
  double slope = 0.0;
};

LocalLine local_line_at(std::span<const double> times, std::span<const double> values, double t,
                        double bandwidth, std::size_t skip = std::numeric_limits<std::size_t>::max()) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (j == skip) continue;
    const double x = times[j] - t;
    const double w = kernel(x / bandwidth);
    s0 += w;
    s1 += w * x;
    s2 += w * x * x;
    t0 += w * values[j];
    t1 += w * x * values[j];
  }
  LocalLine line;
  if (s0 <= 0.0) {
    // All weights underflowed: answer with the nearest retained point.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (j == skip) continue;
      const double d = std::abs(times[j] - t);
      if (d < best) {
        best = d;
        line.intercept = values[j];
      }
    }
    return line;
  }
  const double det = s0 * s2 - s1 * s1;
  // The determinant scales like s0^2 * spacing^2; treat anything at rounding
  // level as singular and fall back to the weighted mean.
  if (det <= s0 * s2 * 1e-12) {
    line.intercept = t0 / s0;
    return line;
  }
  line.intercept = (s2 * t0 - s1 * t1) / det;
  line.slope = (s0 * t1 - s1 * t0) / det;
  return line;
}

void check_knots(std::size_t n) {
  if (n < 2) throw std::invalid_argument("local linear fit needs at least 2 points");
}

}  // namespace

std::vector<double> bandwidth_grid(std::span<const double> times, int size) {
  check_knots(times.size());
  if (size < 2) throw std::invalid_argument("bandwidth grid needs at least 2 entries");
  std::vector<double> sorted(times.begin(), times.end());
  std::sort(sorted.begin(), sorted.end());
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gap = sorted[i] - sorted[i - 1];
    if (gap > 0.0 && gap < lo) lo = gap;
  }
  if (!std::isfinite(lo)) throw std::invalid_argument("bandwidth grid needs distinct times");
  const double hi = std::max(sorted.back() - sorted.front(), lo);
  std::vector<double> grid(static_cast<std::size_t>(size));
  const double ratio = hi / lo;
  for (int i = 0; i < size; ++i) {
    grid[static_cast<std::size_t>(i)] =
        lo * std::pow(ratio, static_cast<double>(i) / static_cast<double>(size - 1));
  }
  return grid;
}

double cv_error(std::span<const double> times, std::span<const double> survival,
                double bandwidth) {
  check_knots(times.size());
  if (times.size() != survival.size()) {
    throw std::invalid_argument("cv_error: time/survival length mismatch");
  }
  if (!(bandwidth > 0.0)) throw std::invalid_argument("cv_error: bandwidth must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const LocalLine line = local_line_at(times, survival, times[i], bandwidth, i);
    const double err = line.intercept - survival[i];
    total += err * err;
  }
  return total / static_cast<double>(times.size());
}

LocalLinearModel fit_local_linear(const SurvivalCurve& curve, std::optional<double> bandwidth) {
  check_knots(curve.times.size());
  if (curve.times.size() != curve.survival.size()) {
    throw std::invalid_argument("local linear fit: time/survival length mismatch");
  }
  LocalLinearModel model;
  model.times = curve.times;
  model.survival = curve.survival;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) {
      throw std::invalid_argument("local linear fit: bandwidth must be positive");
    }
    model.bandwidth = *bandwidth;
    return model;
  }
  const std::vector<double> grid = bandwidth_grid(model.times);
  double best_err = std::numeric_limits<double>::infinity();
  for (double h : grid) {
    const double err = cv_error(model.times, model.survival, h);
    if (err < best_err) {
      best_err = err;
      model.bandwidth = h;
    }
  }
  return model;
}

double predict(const LocalLinearModel& model, double t) {
  check_knots(model.times.size());
  if (!(model.bandwidth > 0.0)) {
    throw std::invalid_argument("local linear predict: bandwidth must be positive");
  }
  double value;
  if (t < model.times.front() || t > model.times.back()) {
    // Continue the line fitted at the boundary knot, so the extrapolation is
    // linear in t rather than flattening back to the kernel-weighted mean.
    const double edge = t < model.times.front() ? model.times.front() : model.times.back();
    const LocalLine line = local_line_at(model.times, model.survival, edge, model.bandwidth);
    value = line.intercept + line.slope * (t - edge);
  } else {
    value = local_line_at(model.times, model.survival, t, model.bandwidth).intercept;
  }
  return std::clamp(value, 0.0, 1.0);
}

double minus2_log_likelihood(const LocalLinearModel& model) {
  check_knots(model.times.size());
  if (!(model.bandwidth > 0.0)) {
    throw std::invalid_argument("local linear likelihood: bandwidth must be positive");
  }
  const double h = model.bandwidth;
  const std::size_t n = model.times.size();
  std::vector<double> log_terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    // In-sample Gaussian kernel conditional density of survival given time,
    // same bandwidth on both axes; the time-kernel normalisation cancels.
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wt = kernel((model.times[i] - model.times[j]) / h);
      num += wt * kernel((model.survival[i] - model.survival[j]) / h) / (h * kSqrt2Pi);
      den += wt;
    }
    log_terms[i] = std::log(num / den);
  }
  return -2.0 * sum_kahan(log_terms);
}

std::vector<double> isotonic_decreasing(std::span<const double> values) {
  // Pool adjacent violators on the negated sequence == non-increasing fit.
  struct Block {
    double total;
    std::size_t count;
    double mean() const { return total / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back(Block{v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean()) {
      blocks[blocks.size() - 2].total += blocks.back().total;
      blocks[blocks.size() - 2].count += blocks.back().count;
      blocks.pop_back();
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : blocks) {
    for (std::size_t i = 0; i < b.count; ++i) out.push_back(b.mean());
  }
  return out;
}

}  // namespace survx
