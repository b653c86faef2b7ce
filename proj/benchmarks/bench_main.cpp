#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "survx/bayes.hpp"
#include "survx/dataset.hpp"
#include "survx/km.hpp"
#include "survx/numerics.hpp"
#include "survx/parametric.hpp"
#include "survx/reconstruct.hpp"
#include "survx/types.hpp"

namespace {

using namespace survx;

Dataset synthetic(int n, std::uint64_t seed) {
  Rng rng(seed, 1);
  Dataset data;
  for (int i = 0; i < n; ++i) {
    const double t_event = std::pow(-std::log(rng.uniform()), 1.0 / 1.2) / 0.03;
    const double t_cens = std::min(-std::log(rng.uniform()) / 0.01, 40.0);
    SubjectRecord rec;
    rec.id = "b-" + std::to_string(i + 1);
    rec.arm = Arm::soc;
    rec.event = t_event <= t_cens;
    rec.time = std::max(std::min(t_event, t_cens), 0.1);
    data.records.push_back(std::move(rec));
  }
  return data;
}

void BM_KaplanMeier(benchmark::State& state) {
  const Dataset data = synthetic(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kaplan_meier(data));
  }
}
BENCHMARK(BM_KaplanMeier)->Arg(1000)->Arg(10000);

void BM_FitMle(benchmark::State& state) {
  const Dataset data = synthetic(1000, 11);
  const ModelKind kind = static_cast<ModelKind>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_mle(kind, data));
  }
}
BENCHMARK(BM_FitMle)
    ->Arg(static_cast<int>(ModelKind::exponential))
    ->Arg(static_cast<int>(ModelKind::weibull))
    ->Arg(static_cast<int>(ModelKind::lognormal))
    ->Arg(static_cast<int>(ModelKind::loglogistic))
    ->Arg(static_cast<int>(ModelKind::gompertz));

void BM_Reconstruct(benchmark::State& state) {
  const Dataset data = synthetic(200, 13);
  const SurvivalCurve km = kaplan_meier(data);
  std::vector<double> times, survival;
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    if (km.events[i] > 0) {
      times.push_back(km.times[i]);
      survival.push_back(km.survival[i]);
    }
  }
  const DigitizedCurve curve = make_digitized_curve(times, survival);
  RiskTable risk;
  for (int t = 0; t <= 40; t += 8) {
    int at_risk = 0;
    for (const SubjectRecord& rec : data.records) {
      if (rec.time >= t) ++at_risk;
    }
    risk.times.push_back(t);
    risk.n_risk.push_back(at_risk);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(reconstruct_ipd(curve, risk));
  }
}
BENCHMARK(BM_Reconstruct);

void BM_Posterior(benchmark::State& state) {
  const Dataset data = synthetic(200, 17);
  McmcConfig mcmc;
  mcmc.chains = 2;
  mcmc.warmup = 500;
  mcmc.kept = 500;
  mcmc.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_posterior(ModelKind::lognormal, data, PowerPriorSpec{}, PriorSpec{}, mcmc));
  }
}
BENCHMARK(BM_Posterior)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
