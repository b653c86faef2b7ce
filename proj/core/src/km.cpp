#include "survx/km.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "survx/csv.hpp"

namespace survx {

SurvivalCurve kaplan_meier(const Dataset& data) {
  if (data.empty()) throw std::invalid_argument("kaplan_meier: empty dataset");
  for (const auto& r : data.records) validate_record(r);

  // Risk set under delayed entry: n(t) = #{entry < t} - #{time < t}, since
  // every exit before t must also have entered before t. Ties at an event
  // time are events-first: a subject censored at t is still at risk at t.
  std::vector<double> entries, exits;
  entries.reserve(data.size());
  exits.reserve(data.size());
  std::vector<double> event_times;
  for (const auto& r : data.records) {
    entries.push_back(r.entry_time);
    exits.push_back(r.time);
    if (r.event) event_times.push_back(r.time);
  }
  std::sort(entries.begin(), entries.end());
  std::sort(exits.begin(), exits.end());
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());

  std::vector<double> all_times;
  all_times.reserve(data.size());
  for (const auto& r : data.records) {
    if (r.event) all_times.push_back(r.time);
  }
  std::sort(all_times.begin(), all_times.end());

  SurvivalCurve curve;
  curve.times.reserve(event_times.size());
  double surv = 1.0;
  double greenwood = 0.0;
  for (double t : event_times) {
    const auto entered =
        std::lower_bound(entries.begin(), entries.end(), t) - entries.begin();
    const auto exited = std::lower_bound(exits.begin(), exits.end(), t) - exits.begin();
    const int n_risk = static_cast<int>(entered - exited);
    const auto d_lo = std::lower_bound(all_times.begin(), all_times.end(), t);
    const auto d_hi = std::upper_bound(all_times.begin(), all_times.end(), t);
    const int d = static_cast<int>(d_hi - d_lo);
    if (n_risk < d || n_risk <= 0) {
      throw std::runtime_error("kaplan_meier: risk set smaller than the event count at t=" +
                               format_double(t) + " (check entry times)");
    }
    surv *= 1.0 - static_cast<double>(d) / static_cast<double>(n_risk);
    if (n_risk > d) {
      greenwood += static_cast<double>(d) /
                   (static_cast<double>(n_risk) * static_cast<double>(n_risk - d));
    }
    curve.times.push_back(t);
    curve.survival.push_back(surv);
    curve.at_risk.push_back(n_risk);
    curve.events.push_back(d);
    // Greenwood variance; at S = 0 the factor S^2 wins, se = 0.
    curve.se.push_back(surv > 0.0 ? surv * std::sqrt(greenwood) : 0.0);
  }
  return curve;
}

LifeTable life_table(const Dataset& data, double interval_width) {
  if (data.empty()) throw std::invalid_argument("life_table: empty dataset");
  if (!(interval_width > 0.0)) {
    throw std::invalid_argument("life_table: interval width must be > 0");
  }
  for (const auto& r : data.records) validate_record(r);

  const double t_max = data.max_time();
  const int intervals = static_cast<int>(std::floor(t_max / interval_width)) + 1;

  LifeTable table;
  table.interval_width = interval_width;
  table.interval_starts.resize(intervals);
  table.n_risk.assign(intervals, 0);
  table.n_events.assign(intervals, 0);
  table.n_censored.assign(intervals, 0);
  table.survival.assign(intervals, 1.0);
  for (int k = 0; k < intervals; ++k) table.interval_starts[k] = k * interval_width;

  for (const auto& r : data.records) {
    const int k = static_cast<int>(std::floor(r.time / interval_width));
    (r.event ? table.n_events : table.n_censored)[k] += 1;
    // At risk for every interval overlapping (entry, time]; a subject
    // entering mid-interval counts as at risk for that whole interval so the
    // counts stay internally consistent.
    const int first = static_cast<int>(std::floor(r.entry_time / interval_width));
    for (int j = first; j <= k; ++j) table.n_risk[j] += 1;
  }

  double surv = 1.0;
  for (int k = 0; k < intervals; ++k) {
    const double effective =
        table.n_risk[k] - 0.5 * static_cast<double>(table.n_censored[k]);
    if (table.n_events[k] > 0) {
      if (!(effective > 0.0)) {
        throw std::runtime_error("life_table: no effective risk in interval starting at " +
                                 format_double(table.interval_starts[k]));
      }
      surv *= 1.0 - static_cast<double>(table.n_events[k]) / effective;
    }
    table.survival[k] = surv;
  }
  return table;
}

double curve_survival_at(const SurvivalCurve& curve, double t) {
  const auto it = std::upper_bound(curve.times.begin(), curve.times.end(), t);
  if (it == curve.times.begin()) return 1.0;
  return curve.survival[static_cast<std::size_t>(it - curve.times.begin()) - 1];
}

void write_curve_csv(const std::string& path, const SurvivalCurve& curve,
                     const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "time,survival,at_risk,se\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out << format_double(curve.times[i]) << ',' << format_double(curve.survival[i]) << ','
        << (i < curve.at_risk.size() ? curve.at_risk[i] : 0) << ','
        << format_double(i < curve.se.size() ? curve.se[i] : 0.0) << '\n';
  }
}

void write_lifetable_csv(const std::string& path, const LifeTable& table,
                         const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "t_start,n_risk,n_events,n_censored,survival\n";
  for (std::size_t k = 0; k < table.interval_starts.size(); ++k) {
    out << format_double(table.interval_starts[k]) << ',' << table.n_risk[k] << ','
        << table.n_events[k] << ',' << table.n_censored[k] << ','
        << format_double(table.survival[k]) << '\n';
  }
}

LifeTable read_lifetable_csv(const std::string& path) {
  const CsvTable csv = read_csv(path);
  auto need = [&](const char* name) {
    auto idx = csv.column(name);
    if (!idx) throw std::runtime_error(path + ": missing required column '" + std::string(name) + "'");
    return *idx;
  };
  const std::size_t start_col = need("t_start");
  const std::size_t risk_col = need("n_risk");
  const std::size_t event_col = need("n_events");
  const std::size_t cens_col = need("n_censored");
  const auto surv_col = csv.column("survival");

  LifeTable table;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const std::string where = path + " row " + std::to_string(csv.line_numbers[i]);
    table.interval_starts.push_back(parse_double(row.at(start_col), where));
    table.n_risk.push_back(static_cast<int>(parse_long(row.at(risk_col), where)));
    table.n_events.push_back(static_cast<int>(parse_long(row.at(event_col), where)));
    table.n_censored.push_back(static_cast<int>(parse_long(row.at(cens_col), where)));
    table.survival.push_back(surv_col && row.size() > *surv_col
                                 ? parse_double(row[*surv_col], where)
                                 : 1.0);
  }
  if (table.interval_starts.size() < 2) {
    throw std::runtime_error(path + ": need at least two rows to infer the interval width");
  }
  const double width = table.interval_starts[1] - table.interval_starts[0];
  for (std::size_t k = 1; k < table.interval_starts.size(); ++k) {
    const double step = table.interval_starts[k] - table.interval_starts[k - 1];
    if (std::abs(step - width) > 1e-9 * std::max(1.0, width)) {
      throw std::runtime_error(path + ": interval starts are not uniformly spaced");
    }
  }
  if (!(width > 0.0)) throw std::runtime_error(path + ": interval width must be positive");
  table.interval_width = width;
  return table;
}

}  // namespace survx
