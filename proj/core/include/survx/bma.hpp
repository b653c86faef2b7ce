#pragma once

#include <span>
#include <string>
#include <vector>

#include "survx/bayes.hpp"
#include "survx/km.hpp"

namespace survx {

enum class WeightScheme { dic, auc, location };

std::string to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view text);

struct BmaWeights {
  WeightScheme scheme = WeightScheme::dic;
  std::vector<double> w;  // non-negative, sums to 1
};

/// Per-model inputs to the weighting schemes.
struct ModelEvidence {
  std::string name;
  double dic = 0.0;
  double auc = 0.0;       // restricted AUC posterior mean
  double location = 0.0;  // posterior mean of the location-type parameter
};

/// dic: w_i proportional to exp(-(DIC_i - min DIC)/2) — invariant to a common
/// shift (raw 1/DIC is available behind the flag); auc: proportional to the
/// restricted AUC; location: proportional to the location estimate, which
/// must be positive for every model.
BmaWeights bma_weights(WeightScheme scheme, std::span<const ModelEvidence> models,
                       bool raw_inverse_dic = false);

/// Per-model posterior survival draws evaluated over a common grid
/// (survival_draws[d][g] = draw d at grid point g).
struct CurveDraws {
  std::vector<double> grid;
  std::vector<std::vector<double>> survival_draws;
};

CurveDraws posterior_curve_draws(const PosteriorSample& sample, std::span<const double> grid);

/// Pointwise mixture S(t) = sum_i w_i S_i(t). The SE is the SD of the
/// mixture of the posterior draws, i.e. within-model variance plus
/// between-model spread. Every component must share the target grid.
SurvivalCurve average_curve(const BmaWeights& weights, std::span<const CurveDraws> components,
                            std::span<const double> grid);

struct MixtureSummary {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mixture moments of a scalar (e.g. per-draw restricted AUC) across models.
MixtureSummary mixture_moments(const BmaWeights& weights,
                               std::span<const std::vector<double>> per_model_draws);

}  // namespace survx
