#include "survx/bma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "survx/numerics.hpp"

namespace survx {

std::string to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::dic: return "DIC";
    case WeightScheme::auc: return "AUC";
    case WeightScheme::location: return "LOCATION";
  }
  return "DIC";
}

WeightScheme parse_weight_scheme(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "dic") return WeightScheme::dic;
  if (t == "auc") return WeightScheme::auc;
  if (t == "location") return WeightScheme::location;
  throw std::invalid_argument("unknown weight scheme '" + std::string(text) + "'");
}

BmaWeights bma_weights(WeightScheme scheme, std::span<const ModelEvidence> models,
                       bool raw_inverse_dic) {
  if (models.empty()) throw std::invalid_argument("bma_weights: no models");

  std::vector<double> raw(models.size());
  switch (scheme) {
    case WeightScheme::dic: {
      if (raw_inverse_dic) {
        for (std::size_t i = 0; i < models.size(); ++i) {
          if (!(models[i].dic > 0.0)) {
            throw std::invalid_argument("bma_weights: raw inverse-DIC needs positive DIC for '" +
                                        models[i].name + "'");
          }
          raw[i] = 1.0 / models[i].dic;
        }
      } else {
        // exp(-delta/2) relative to the best model, so a common shift in DIC
        // cancels.
        double min_dic = models[0].dic;
        for (const auto& m : models) min_dic = std::min(min_dic, m.dic);
        for (std::size_t i = 0; i < models.size(); ++i) {
          raw[i] = std::exp(-0.5 * (models[i].dic - min_dic));
        }
      }
      break;
    }
    case WeightScheme::auc:
      for (std::size_t i = 0; i < models.size(); ++i) {
        if (!(models[i].auc > 0.0)) {
          throw std::invalid_argument("bma_weights: AUC weighting needs positive AUC for '" +
                                      models[i].name + "'");
        }
        raw[i] = models[i].auc;
      }
      break;
    case WeightScheme::location:
      for (std::size_t i = 0; i < models.size(); ++i) {
        if (!(models[i].location > 0.0)) {
          throw std::invalid_argument(
              "bma_weights: location weighting needs a positive location estimate for '" +
              models[i].name + "'");
        }
        raw[i] = models[i].location;
      }
      break;
  }

  const double total = sum_kahan(raw);
  if (!(total > 0.0)) throw std::invalid_argument("bma_weights: weights sum to zero");
  BmaWeights weights;
  weights.scheme = scheme;
  weights.w.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) weights.w[i] = raw[i] / total;
  return weights;
}

CurveDraws posterior_curve_draws(const PosteriorSample& sample, std::span<const double> grid) {
  if (sample.draws.empty()) {
    throw std::invalid_argument("posterior_curve_draws: no posterior draws");
  }
  CurveDraws out;
  out.grid.assign(grid.begin(), grid.end());
  out.survival_draws.reserve(sample.draws.size());
  for (const ModelParams& p : sample.draws) {
    std::vector<double> row;
    row.reserve(grid.size());
    for (double t : grid) row.push_back(survival(sample.kind, p, t));
    out.survival_draws.push_back(std::move(row));
  }
  return out;
}

SurvivalCurve average_curve(const BmaWeights& weights, std::span<const CurveDraws> components,
                            std::span<const double> grid) {
  if (components.size() != weights.w.size()) {
    throw std::invalid_argument("average_curve: weight/component count mismatch");
  }
  if (components.empty()) throw std::invalid_argument("average_curve: no components");
  for (const auto& c : components) {
    if (c.grid.size() != grid.size() ||
        !std::equal(c.grid.begin(), c.grid.end(), grid.begin())) {
      throw std::invalid_argument("average_curve: component grids must match the target grid");
    }
    if (c.survival_draws.empty()) {
      throw std::invalid_argument("average_curve: component has no draws");
    }
  }

  SurvivalCurve curve;
  curve.times.assign(grid.begin(), grid.end());
  curve.survival.resize(grid.size());
  curve.se.resize(grid.size());
  curve.at_risk.assign(grid.size(), 0);

  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mix_mean = 0.0, mix_second = 0.0;
    for (std::size_t m = 0; m < components.size(); ++m) {
      std::vector<double> values;
      values.reserve(components[m].survival_draws.size());
      for (const auto& row : components[m].survival_draws) values.push_back(row[g]);
      const double mu = mean(values);
      // population second moment of the component draws
      double second = 0.0;
      for (double v : values) second += v * v;
      second /= static_cast<double>(values.size());
      mix_mean += weights.w[m] * mu;
      mix_second += weights.w[m] * second;
    }
    curve.survival[g] = mix_mean;
    const double var = mix_second - mix_mean * mix_mean;
    curve.se[g] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return curve;
}

MixtureSummary mixture_moments(const BmaWeights& weights,
                               std::span<const std::vector<double>> per_model_draws) {
  if (per_model_draws.size() != weights.w.size()) {
    throw std::invalid_argument("mixture_moments: weight/component count mismatch");
  }
  double mix_mean = 0.0, mix_second = 0.0;
  for (std::size_t m = 0; m < per_model_draws.size(); ++m) {
    const auto& draws = per_model_draws[m];
    if (draws.empty()) throw std::invalid_argument("mixture_moments: component has no draws");
    const double mu = mean(draws);
    double second = 0.0;
    for (double v : draws) second += v * v;
    second /= static_cast<double>(draws.size());
    mix_mean += weights.w[m] * mu;
    mix_second += weights.w[m] * second;
  }
  MixtureSummary summary;
  summary.mean = mix_mean;
  const double var = mix_second - mix_mean * mix_mean;
  summary.sd = var > 0.0 ? std::sqrt(var) : 0.0;
  return summary;
}

}  // namespace survx
