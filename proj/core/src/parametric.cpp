#include "survx/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "survx/numerics.hpp"

namespace survx {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + e^u) without overflow.
double log1pexp(double u) { return u > 35.0 ? u : std::log1p(std::exp(u)); }

bool params_valid(ModelKind kind, const ModelParams& p) {
  switch (kind) {
    case ModelKind::exponential:
      return std::isfinite(p.rate) && p.rate > 0.0;
    case ModelKind::weibull:
    case ModelKind::loglogistic:
      return std::isfinite(p.rate) && p.rate > 0.0 && std::isfinite(p.shape) && p.shape > 0.0;
    case ModelKind::lognormal:
      return std::isfinite(p.meanlog) && std::isfinite(p.sdlog) && p.sdlog > 0.0;
    case ModelKind::gompertz:
      return std::isfinite(p.rate) && p.rate > 0.0 && std::isfinite(p.shape);
  }
  return false;
}

// Cumulative hazard H(t) = -log S(t); the closed forms below are shared by
// survival and the likelihood.
double cumulative_hazard(ModelKind kind, const ModelParams& p, double t) {
  switch (kind) {
    case ModelKind::exponential:
      return p.rate * t;
    case ModelKind::weibull:
      return t <= 0.0 ? 0.0 : std::pow(p.rate * t, p.shape);
    case ModelKind::lognormal: {
      if (t <= 0.0) return 0.0;
      const double z = (std::log(t) - p.meanlog) / p.sdlog;
      return -normal_logcdf(-z);
    }
    case ModelKind::loglogistic:
      return t <= 0.0 ? 0.0 : log1pexp(p.shape * std::log(p.rate * t));
    case ModelKind::gompertz:
      if (p.shape == 0.0) return p.rate * t;
      return p.rate * std::expm1(p.shape * t) / p.shape;
  }
  return 0.0;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::exponential: return "exponential";
    case ModelKind::weibull: return "weibull";
    case ModelKind::lognormal: return "lognormal";
    case ModelKind::loglogistic: return "loglogistic";
    case ModelKind::gompertz: return "gompertz";
  }
  return "exponential";
}

ModelKind parse_model_kind(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ModelKind kind : all_model_kinds()) {
    if (t == to_string(kind)) return kind;
  }
  if (t == "log-logistic") return ModelKind::loglogistic;
  if (t == "log-normal") return ModelKind::lognormal;
  throw std::invalid_argument("unknown model kind '" + std::string(text) + "'");
}

int free_param_count(ModelKind kind) {
  return kind == ModelKind::exponential ? 1 : 2;
}

std::vector<std::string> param_names(ModelKind kind) {
  switch (kind) {
    case ModelKind::exponential: return {"rate"};
    case ModelKind::lognormal: return {"meanlog", "sdlog"};
    default: return {"rate", "shape"};
  }
}

void validate_params(ModelKind kind, const ModelParams& params) {
  if (!params_valid(kind, params)) {
    throw std::invalid_argument("invalid parameters for the " + to_string(kind) + " model");
  }
}

std::vector<double> to_unconstrained(ModelKind kind, const ModelParams& p) {
  validate_params(kind, p);
  switch (kind) {
    case ModelKind::exponential: return {std::log(p.rate)};
    case ModelKind::weibull:
    case ModelKind::loglogistic: return {std::log(p.rate), std::log(p.shape)};
    case ModelKind::gompertz: return {std::log(p.rate), p.shape};
    case ModelKind::lognormal: return {p.meanlog, std::log(p.sdlog)};
  }
  return {};
}

ModelParams from_unconstrained(ModelKind kind, std::span<const double> u) {
  if (static_cast<int>(u.size()) != free_param_count(kind)) {
    throw std::invalid_argument("from_unconstrained: wrong dimension for " + to_string(kind));
  }
  ModelParams p;
  switch (kind) {
    case ModelKind::exponential: p.rate = std::exp(u[0]); break;
    case ModelKind::weibull:
    case ModelKind::loglogistic:
      p.rate = std::exp(u[0]);
      p.shape = std::exp(u[1]);
      break;
    case ModelKind::gompertz:
      p.rate = std::exp(u[0]);
      p.shape = u[1];
      break;
    case ModelKind::lognormal:
      p.meanlog = u[0];
      p.sdlog = std::exp(u[1]);
      break;
  }
  return p;
}

double survival(ModelKind kind, const ModelParams& params, double t) {
  validate_params(kind, params);
  if (!(t >= 0.0)) throw std::invalid_argument("survival: t must be >= 0");
  return std::exp(-cumulative_hazard(kind, params, t));
}

double log_survival(ModelKind kind, const ModelParams& params, double t) {
  validate_params(kind, params);
  return -cumulative_hazard(kind, params, t);
}

double hazard(ModelKind kind, const ModelParams& p, double t) {
  validate_params(kind, p);
  if (!(t >= 0.0)) throw std::invalid_argument("hazard: t must be >= 0");
  switch (kind) {
    case ModelKind::exponential:
      return p.rate;
    case ModelKind::weibull:
      if (t == 0.0) return p.shape > 1.0 ? 0.0 : (p.shape == 1.0 ? p.rate : kInf);
      return p.rate * p.shape * std::pow(p.rate * t, p.shape - 1.0);
    case ModelKind::lognormal: {
      if (t == 0.0) return 0.0;
      const double z = (std::log(t) - p.meanlog) / p.sdlog;
      // f/S, with both on the log scale so deep tails stay finite.
      const double log_f = normal_logpdf(z) - std::log(t * p.sdlog);
      return std::exp(log_f - normal_logcdf(-z));
    }
    case ModelKind::loglogistic: {
      if (t == 0.0) return p.shape > 1.0 ? 0.0 : (p.shape == 1.0 ? p.rate : kInf);
      const double u = std::pow(p.rate * t, p.shape);
      return p.shape * p.rate * std::pow(p.rate * t, p.shape - 1.0) / (1.0 + u);
    }
    case ModelKind::gompertz:
      return p.rate * std::exp(p.shape * t);
  }
  return 0.0;
}

double log_density(ModelKind kind, const ModelParams& p, double t) {
  validate_params(kind, p);
  if (!(t > 0.0)) throw std::invalid_argument("log_density: t must be > 0");
  switch (kind) {
    case ModelKind::exponential:
      return std::log(p.rate) - p.rate * t;
    case ModelKind::weibull: {
      const double log_rt = std::log(p.rate * t);
      return std::log(p.rate * p.shape) + (p.shape - 1.0) * log_rt -
             std::pow(p.rate * t, p.shape);
    }
    case ModelKind::lognormal: {
      const double z = (std::log(t) - p.meanlog) / p.sdlog;
      return normal_logpdf(z) - std::log(t * p.sdlog);
    }
    case ModelKind::loglogistic: {
      const double u = p.shape * std::log(p.rate * t);
      return std::log(p.shape) + p.shape * std::log(p.rate) + (p.shape - 1.0) * std::log(t) -
             2.0 * log1pexp(u);
    }
    case ModelKind::gompertz:
      return std::log(p.rate) + p.shape * t - cumulative_hazard(kind, p, t);
  }
  return -kInf;
}

double log_likelihood(ModelKind kind, const ModelParams& params, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("log_likelihood: empty dataset");
  if (!params_valid(kind, params)) return -kInf;

  // Kahan-compensated accumulation keeps pooled-vs-split sums in agreement to
  // a few ulps, which the power-prior identities lean on.
  double sum = 0.0, carry = 0.0;
  auto add = [&](double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  };
  for (const auto& rec : data.records) {
    validate_record(rec);
    const double contribution = rec.event ? log_density(kind, params, rec.time)
                                          : -cumulative_hazard(kind, params, rec.time);
    if (std::isnan(contribution) || contribution == -kInf) return -kInf;
    add(contribution);
    if (rec.entry_time > 0.0) {
      // delayed entry: condition on survival to the entry time
      const double log_s_entry = -cumulative_hazard(kind, params, rec.entry_time);
      if (std::isnan(log_s_entry) || log_s_entry == -kInf) return -kInf;
      add(-log_s_entry);
    }
  }
  return std::isfinite(sum) ? sum : -kInf;
}

namespace {

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Three deterministic starting points per model: moment-based, median-based,
// and a unit-ish fallback.
std::vector<ModelParams> starting_points(ModelKind kind, const Dataset& data) {
  std::vector<double> times, log_times;
  double total_exposure = 0.0;
  for (const auto& r : data.records) {
    times.push_back(r.time);
    log_times.push_back(std::log(r.time));
    total_exposure += r.time - r.entry_time;
  }
  const double events = static_cast<double>(data.event_count());
  const double exp_rate = std::max(events, 1.0) / total_exposure;
  const double mean_t = mean(times);
  const double median_t = median_of(times);
  const double mlog = mean(log_times);
  const double slog = std::max(sample_sd(log_times), 0.1);

  auto clamp_shape = [](double s) { return std::clamp(s, 0.2, 5.0); };

  std::vector<ModelParams> starts;
  switch (kind) {
    case ModelKind::exponential:
      starts.push_back({.rate = exp_rate});
      starts.push_back({.rate = std::numbers::ln2 / median_t});
      starts.push_back({.rate = 1.0 / mean_t});
      break;
    case ModelKind::weibull:
      // log-time spread pins the shape: sd(log T) = pi / (sqrt(6) * shape)
      starts.push_back({.rate = std::exp(-mlog),
                        .shape = clamp_shape(std::numbers::pi / (std::sqrt(6.0) * slog))});
      starts.push_back({.rate = std::numbers::ln2 / median_t, .shape = 1.0});
      starts.push_back({.rate = 1.0 / mean_t, .shape = 1.0});
      break;
    case ModelKind::loglogistic:
      // logistic log-time sd = pi / (sqrt(3) * shape)
      starts.push_back({.rate = std::exp(-mlog),
                        .shape = clamp_shape(std::numbers::pi / (std::sqrt(3.0) * slog))});
      starts.push_back({.rate = 1.0 / median_t, .shape = 1.0});
      starts.push_back({.rate = 1.0 / mean_t, .shape = 1.0});
      break;
    case ModelKind::lognormal:
      starts.push_back({.meanlog = mlog, .sdlog = slog});
      starts.push_back({.meanlog = std::log(median_t), .sdlog = 1.0});
      starts.push_back({.meanlog = 0.0, .sdlog = 1.0});
      break;
    case ModelKind::gompertz:
      starts.push_back({.rate = exp_rate, .shape = 0.01});
      starts.push_back({.rate = std::numbers::ln2 / median_t, .shape = -0.01});
      starts.push_back({.rate = 1.0 / mean_t, .shape = 0.0});
      break;
  }
  return starts;
}

}  // namespace

ParametricFit fit_mle(ModelKind kind, const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("fit_mle: empty dataset");
  if (data.event_count() == 0) {
    throw std::invalid_argument("fit_mle: dataset has no events; the likelihood is unbounded");
  }
  for (const auto& r : data.records) validate_record(r);

  const int dim = free_param_count(kind);
  ParametricFit fit;
  fit.kind = kind;
  fit.n = data.size();

  std::vector<double> u_hat;
  if (kind == ModelKind::exponential) {
    // Closed form: total events over total time at risk.
    double exposure = 0.0;
    for (const auto& r : data.records) exposure += r.time - r.entry_time;
    fit.params.rate = static_cast<double>(data.event_count()) / exposure;
    u_hat = to_unconstrained(kind, fit.params);
    fit.converged = true;
  } else {
    auto objective = [&](std::span<const double> u) {
      return -log_likelihood(kind, from_unconstrained(kind, u), data);
    };
    NelderMeadResult best;
    bool have_best = false;
    for (const ModelParams& start : starting_points(kind, data)) {
      NelderMeadResult r = nelder_mead(objective, to_unconstrained(kind, start));
      if (!have_best || r.value < best.value) {
        best = std::move(r);
        have_best = true;
      }
    }
    // One polishing restart from the incumbent tightens the simplex.
    NelderMeadResult polished = nelder_mead(objective, best.x);
    if (polished.value <= best.value) best = std::move(polished);

    u_hat = best.x;
    fit.params = from_unconstrained(kind, u_hat);
    fit.converged = best.converged;
  }

  const double loglik = log_likelihood(kind, fit.params, data);
  fit.minus2_loglik = -2.0 * loglik;
  fit.aic = fit.minus2_loglik + 2.0 * dim;
  fit.bic = fit.minus2_loglik + dim * std::log(static_cast<double>(fit.n));

  auto neg_loglik_u = [&](std::span<const double> u) {
    return -log_likelihood(kind, from_unconstrained(kind, u), data);
  };
  std::vector<double> hess = fd_hessian(neg_loglik_u, u_hat);
  fit.covariance.dim = dim;
  if (invert_spd(hess, dim)) {
    for (int i = 0; i < dim * dim; ++i) fit.covariance.values[static_cast<std::size_t>(i)] = hess[static_cast<std::size_t>(i)];
  } else {
    fit.covariance.values.fill(0.0);
    fit.converged = false;
  }
  return fit;
}

SurvivalCurve extrapolate(const ParametricFit& fit, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("extrapolate: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw std::invalid_argument("extrapolate: grid times must be >= 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("extrapolate: grid must be strictly increasing");
    }
  }
  const std::vector<double> u_hat = to_unconstrained(fit.kind, fit.params);
  const int dim = free_param_count(fit.kind);

  SurvivalCurve curve;
  curve.times.assign(grid.begin(), grid.end());
  curve.survival.reserve(grid.size());
  curve.se.reserve(grid.size());
  curve.at_risk.assign(grid.size(), 0);
  for (double t : grid) {
    curve.survival.push_back(survival(fit.kind, fit.params, t));
    double var = 0.0;
    if (fit.covariance.dim == dim) {
      auto s_of_u = [&](std::span<const double> u) {
        return survival(fit.kind, from_unconstrained(fit.kind, u), t);
      };
      const std::vector<double> g = fd_gradient(s_of_u, u_hat);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) var += g[static_cast<std::size_t>(i)] * fit.covariance.at(i, j) * g[static_cast<std::size_t>(j)];
      }
    }
    curve.se.push_back(var > 0.0 ? std::sqrt(var) : 0.0);
  }
  return curve;
}

}  // namespace survx
