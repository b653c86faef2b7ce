// survx-datagen — writes the bundled demonstration data set.
//
// Everything is synthetic and fully determined by the seeds below, so the
// files in data/ can be regenerated at any time:
//   rct_ipd.csv            two-arm trial with administrative censoring at 36
//   registry_lifetable.csv long-term single-cohort life table to 120 months
//   digitized_curve.csv    step curve as read off a published figure
//   risk_table.csv         numbers-at-risk row matching the digitized curve
//   report.cfg             ready-to-run configuration for `survx report`

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "survx/csv.hpp"
#include "survx/dataset.hpp"
#include "survx/km.hpp"
#include "survx/numerics.hpp"
#include "survx/types.hpp"

namespace fs = std::filesystem;
using namespace survx;

namespace {

constexpr std::uint64_t kSeed = 20240611;

// Weibull event time by inversion: S(t) = exp(-(rate t)^shape).
double weibull_time(Rng& rng, double rate, double shape) {
  const double u = rng.uniform();
  return std::pow(-std::log(u), 1.0 / shape) / rate;
}

Dataset make_trial(Rng& rng) {
  Dataset data;
  data.label = "trial";
  const double admin = 36.0;
  int id = 0;
  for (int arm_index = 0; arm_index < 2; ++arm_index) {
    const Arm arm = arm_index == 0 ? Arm::soc : Arm::experimental;
    // Hazard ratio 0.7 for the experimental arm under proportional hazards.
    const double rate = arm == Arm::soc ? 0.02 : 0.02 * std::pow(0.7, 1.0 / 1.15);
    for (int i = 0; i < 150; ++i) {
      const double t_event = weibull_time(rng, rate, 1.15);
      const double t_drop = -std::log(rng.uniform()) / 0.004;
      SubjectRecord rec;
      rec.id = "s-" + std::to_string(++id);
      rec.arm = arm;
      rec.source = Source::rct;
      const double t_cens = std::min(t_drop, admin);
      rec.event = t_event <= t_cens;
      rec.time = std::min(t_event, t_cens);
      // keep times away from zero so log-time models are comfortable
      rec.time = std::max(rec.time, 0.25);
      data.records.push_back(std::move(rec));
    }
  }
  return data;
}

void write_registry_lifetable(const fs::path& path) {
  // Single SOC-like cohort followed to 120 months in 6-month intervals; the
  // survival column chains the per-interval event fractions.
  std::ofstream file(path, std::ios::binary);
  file << "# synthetic registry cohort (survx-datagen seed=" << kSeed << ")\n";
  file << "t_start,n_risk,n_events,n_censored,survival\n";
  const double rate = 0.021;
  const double shape = 1.12;
  int n = 600;
  double survival = 1.0;
  for (int k = 0; k < 20 && n > 0; ++k) {
    const double t0 = 6.0 * k;
    const double t1 = t0 + 6.0;
    const double s0 = std::exp(-std::pow(rate * t0, shape));
    const double s1 = std::exp(-std::pow(rate * t1, shape));
    const double p_event = 1.0 - s1 / s0;
    int events = static_cast<int>(std::lround(n * p_event));
    events = std::min(events, n);
    int censored = std::min(static_cast<int>(std::lround(n * 0.015)), n - events);
    if (k == 19) censored = n - events;  // close the table
    if (n > 0) survival *= 1.0 - static_cast<double>(events) / n;
    file << format_double(t0) << "," << n << "," << events << "," << censored << ","
         << format_double(survival) << "\n";
    n -= events + censored;
  }
}

void write_published_pair(Rng& rng, const fs::path& curve_path, const fs::path& risk_path) {
  // A published single-arm figure: its step curve plus numbers at risk every
  // six months. Generated from IPD so the pair is internally consistent.
  Dataset cohort;
  cohort.label = "published";
  for (int i = 0; i < 80; ++i) {
    const double t_event = weibull_time(rng, 0.025, 1.1);
    const double t_drop = -std::log(rng.uniform()) / 0.006;
    SubjectRecord rec;
    rec.id = "p-" + std::to_string(i + 1);
    rec.arm = Arm::soc;
    rec.source = Source::rct;
    const double t_cens = std::min(t_drop, 30.0);
    rec.event = t_event <= t_cens;
    rec.time = std::max(std::min(t_event, t_cens), 0.25);
    cohort.records.push_back(std::move(rec));
  }
  const SurvivalCurve km = kaplan_meier(cohort);

  std::ofstream curve(curve_path, std::ios::binary);
  curve << "# synthetic digitized curve (survx-datagen seed=" << kSeed << ")\n";
  curve << "time,survival\n";
  int total_events = 0;
  for (std::size_t i = 0; i < km.times.size(); ++i) {
    if (km.events[i] <= 0) continue;
    total_events += km.events[i];
    curve << format_double(km.times[i]) << "," << format_double(km.survival[i]) << "\n";
  }

  std::ofstream risk(risk_path, std::ios::binary);
  risk << "# numbers at risk for digitized_curve.csv\n";
  risk << "time,n_risk\n";
  for (int t = 0; t <= 30; t += 6) {
    int at_risk = 0;
    for (const SubjectRecord& rec : cohort.records) {
      if (rec.time >= t) ++at_risk;
    }
    risk << t << "," << at_risk << "\n";
  }
  risk << "total_events," << total_events << "\n";
}

void write_report_config(const fs::path& path) {
  std::ofstream file(path, std::ios::binary);
  file << "# demonstration configuration for `survx report --config data/report.cfg`\n"
       << "# (paths are relative to the repository root)\n"
       << "input=data/rct_ipd.csv\n"
       << "arm=soc\n"
       << "registry_lifetable=data/registry_lifetable.csv\n"
       << "trim=0.1\n"
       << "horizon=72\n"
       << "grid_step=1\n"
       << "seed=1\n"
       << "out=report_out\n"
       << "alpha=0.001,0.2,1,1.5,2\n"
       << "anchor_t=60\n"
       << "anchor_s=0.32\n"
       << "anchor_var=0.01\n"
       << "chains=4\n"
       << "warmup=2000\n"
       << "kept=2000\n"
       << "bayes_kind=lognormal\n"
       << "scheme=dic\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: survx-datagen <output-directory>\n";
    return 2;
  }
  try {
    const fs::path out = argv[1];
    fs::create_directories(out);
    Rng rng(kSeed, 1);
    const Dataset trial = make_trial(rng);
    write_ipd_csv((out / "rct_ipd.csv").string(), trial,
                  "synthetic two-arm trial (survx-datagen seed=" + std::to_string(kSeed) + ")");
    write_registry_lifetable(out / "registry_lifetable.csv");
    write_published_pair(rng, out / "digitized_curve.csv", out / "risk_table.csv");
    write_report_config(out / "report.cfg");
    std::cout << "wrote demonstration data to " << out.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
