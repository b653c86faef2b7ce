#include "survx/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "survx/csv.hpp"

namespace survx {

namespace {

std::string fmt(double v) { return format_double(v); }

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("reconstruction: " + what);
}

/// One curve drop: survival steps down to `target` at `time`.
struct Drop {
  double time = 0.0;
  double target = 0.0;
};

/// Candidate (events, at-risk) pair for a drop, scored by how far the
/// resulting product-limit value lands from the digitized target.
struct Pick {
  int d = 0;
  int n = 0;
  double err = std::numeric_limits<double>::infinity();
};

void consider(Pick& best, double s_run, double target, int d, int n) {
  // Same expression the estimator uses, so an exact input matches bit-for-bit.
  const double value = s_run * (1.0 - static_cast<double>(d) / static_cast<double>(n));
  const double err = std::abs(value - target);
  if (err < best.err) best = Pick{d, n, err};
}

/// Best (d, n) over n in [n_lo, n_hi] with 1 <= d <= n - keep_after. Ties in
/// error prefer the larger at-risk count (less inferred censoring), then the
/// smaller event count; scanning n downward with strict improvement and the
/// floor candidate first gives exactly that order. Returns n == 0 when no
/// pair is feasible.
Pick best_pick(double s_run, double target, int n_lo, int n_hi, int keep_after) {
  Pick best;
  if (!(s_run > 0.0)) return best;
  for (int n = n_hi; n >= std::max(n_lo, 1); --n) {
    const int d_hi = n - keep_after;
    if (d_hi < 1) continue;
    const double ideal = std::clamp(static_cast<double>(n) * (1.0 - target / s_run), 0.0,
                                    static_cast<double>(n));
    const int d0 = static_cast<int>(std::floor(ideal));
    consider(best, s_run, target, std::clamp(d0, 1, d_hi), n);
    consider(best, s_run, target, std::clamp(d0 + 1, 1, d_hi), n);
  }
  return best;
}

/// Shared output state while records are emitted.
struct Builder {
  std::vector<SubjectRecord> records;
  Arm arm = Arm::soc;

  void emit(double time, bool event) {
    SubjectRecord rec;
    rec.id = "rec";  // renumbered once the set is final
    rec.time = time;
    rec.event = event;
    rec.arm = arm;
    rec.source = Source::reconstructed;
    rec.entry_time = 0.0;
    records.push_back(std::move(rec));
  }

  /// `count` censorings spread uniformly over the open interval (from, to).
  void censor_between(int count, double from, double to) {
    for (int i = 1; i <= count; ++i) {
      emit(from + (to - from) * static_cast<double>(i) / static_cast<double>(count + 1), false);
    }
  }
};

/// Reconstructs the region after the last risk-table row, where censoring is
/// unobservable: `extra_censored` subjects leave before the first drop in the
/// region and the drops themselves assume no further attrition. Returns false
/// when some drop cannot be matched.
bool build_tail(Builder& out, std::vector<Drop>::const_iterator first,
                std::vector<Drop>::const_iterator last, double& s_run, int& n_cur,
                std::string* error) {
  for (auto it = first; it != last; ++it) {
    const Pick pick = best_pick(s_run, it->target, n_cur, n_cur, 0);
    if (pick.n == 0) {
      if (error) *error = "no subjects left at the curve drop at time " + fmt(it->time);
      return false;
    }
    if (pick.err > 0.5 / static_cast<double>(n_cur)) {
      if (error) {
        *error = "curve drop at time " + fmt(it->time) +
                 " cannot be matched beyond the last risk-table row (nearest achievable "
                 "survival misses by " +
                 fmt(pick.err) + ")";
      }
      return false;
    }
    for (int i = 0; i < pick.d; ++i) out.emit(it->time, true);
    s_run *= 1.0 - static_cast<double>(pick.d) / static_cast<double>(pick.n);
    n_cur -= pick.d;
  }
  return true;
}

long event_count(const std::vector<SubjectRecord>& records) {
  long total = 0;
  for (const auto& rec : records) total += rec.event ? 1 : 0;
  return total;
}

}  // namespace

DigitizedCurve make_digitized_curve(std::vector<double> times, std::vector<double> survival) {
  if (times.size() != survival.size()) {
    throw std::invalid_argument("digitized curve: time/survival length mismatch");
  }
  if (times.empty()) throw std::invalid_argument("digitized curve: no points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw std::invalid_argument("digitized curve: bad time " + fmt(times[i]) + " at point " +
                                  std::to_string(i + 1));
    }
    if (!std::isfinite(survival[i]) || survival[i] < 0.0 || survival[i] > 1.0) {
      throw std::invalid_argument("digitized curve: survival " + fmt(survival[i]) +
                                  " outside [0, 1] at time " + fmt(times[i]));
    }
    if (i > 0 && times[i] < times[i - 1]) {
      throw std::invalid_argument("digitized curve: times decrease at time " + fmt(times[i]));
    }
    if (i > 0 && survival[i] > survival[i - 1]) {
      throw std::invalid_argument("digitized curve: survival rises at time " + fmt(times[i]));
    }
  }
  if (times.front() != 0.0) {
    times.insert(times.begin(), 0.0);
    survival.insert(survival.begin(), 1.0);
  }
  if (survival.front() != 1.0) {
    throw std::invalid_argument("digitized curve: survival at time 0 must be 1");
  }
  DigitizedCurve curve;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!curve.times.empty() && curve.times.back() == times[i] &&
        curve.survival.back() == survival[i]) {
      continue;  // exact duplicate point
    }
    curve.times.push_back(times[i]);
    curve.survival.push_back(survival[i]);
  }
  return curve;
}

void validate_risk_table(const RiskTable& table) {
  if (table.times.size() != table.n_risk.size()) {
    throw std::invalid_argument("risk table: time/count length mismatch");
  }
  if (table.times.empty()) throw std::invalid_argument("risk table: no rows");
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    if (!std::isfinite(table.times[i]) || table.times[i] < 0.0) {
      throw std::invalid_argument("risk table: bad time " + fmt(table.times[i]));
    }
    if (table.n_risk[i] < 0) {
      throw std::invalid_argument("risk table: negative count at time " + fmt(table.times[i]));
    }
    if (i > 0 && table.times[i] <= table.times[i - 1]) {
      throw std::invalid_argument("risk table: times must increase at time " +
                                  fmt(table.times[i]));
    }
    if (i > 0 && table.n_risk[i] > table.n_risk[i - 1]) {
      throw std::invalid_argument("risk table: counts rise at time " + fmt(table.times[i]));
    }
  }
  if (table.total_events && *table.total_events < 0) {
    throw std::invalid_argument("risk table: negative total_events");
  }
}

DigitizedCurve read_digitized_curve_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  auto need = [&](const char* name) {
    auto idx = table.column(name);
    if (!idx) {
      throw std::runtime_error(path + ": missing required column '" + std::string(name) + "'");
    }
    return *idx;
  };
  const std::size_t tc = need("time");
  const std::size_t sc = need("survival");
  std::vector<double> times, survival;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string where = path + " row at line " + std::to_string(table.line_numbers[r]);
    times.push_back(parse_double(table.rows[r][tc], where + ", time"));
    survival.push_back(parse_double(table.rows[r][sc], where + ", survival"));
  }
  return make_digitized_curve(std::move(times), std::move(survival));
}

RiskTable read_risk_table_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  auto need = [&](const char* name) {
    auto idx = table.column(name);
    if (!idx) {
      throw std::runtime_error(path + ": missing required column '" + std::string(name) + "'");
    }
    return *idx;
  };
  const std::size_t tc = need("time");
  const std::size_t nc = need("n_risk");
  RiskTable risk;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string where = path + " row at line " + std::to_string(table.line_numbers[r]);
    if (table.rows[r][tc] == "total_events") {
      risk.total_events = parse_long(table.rows[r][nc], where + ", total_events");
      continue;
    }
    risk.times.push_back(parse_double(table.rows[r][tc], where + ", time"));
    risk.n_risk.push_back(static_cast<int>(parse_long(table.rows[r][nc], where + ", n_risk")));
  }
  validate_risk_table(risk);
  return risk;
}

Dataset reconstruct_ipd(const DigitizedCurve& input, const RiskTable& risk, Arm arm) {
  // Re-canonicalise so callers may pass raw digitized points; duplicated
  // points and a missing origin do not change the result.
  const DigitizedCurve curve = make_digitized_curve(input.times, input.survival);
  validate_risk_table(risk);
  if (curve.times.size() < 2) fail("curve needs at least two points");

  // Collapse repeated times to their final survival value so a vertical drop
  // digitized as two points at the same abscissa reads as one drop.
  std::vector<double> ct, cs;
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (!ct.empty() && ct.back() == curve.times[i]) {
      cs.back() = curve.survival[i];
    } else {
      ct.push_back(curve.times[i]);
      cs.push_back(curve.survival[i]);
    }
  }
  if (cs.front() != 1.0) fail("curve drops at time 0");

  std::vector<Drop> drops;
  for (std::size_t i = 1; i < ct.size(); ++i) {
    if (cs[i] < cs[i - 1]) drops.push_back(Drop{ct[i], cs[i]});
  }
  if (!drops.empty() && drops.front().time < risk.times.front()) {
    fail("curve drops at time " + fmt(drops.front().time) +
         " before the first risk-table row at time " + fmt(risk.times.front()));
  }

  Builder out;
  out.arm = arm;
  double s_run = 1.0;
  int n_cur = risk.n_risk.front();
  double cursor = risk.times.front();
  std::size_t row = 0;  // risk-table row already applied
  const std::size_t rows = risk.times.size();
  std::size_t di = 0;

  const auto interval_label = [&] {
    std::ostringstream os;
    os << "risk-table interval [" << fmt(risk.times[row]) << ", ";
    if (row + 1 < rows) {
      os << fmt(risk.times[row + 1]) << ")";
    } else {
      os << "end)";
    }
    return os.str();
  };

  // Drop exactly at the current table row: the at-risk count is pinned, only
  // the event count is searched.
  const auto apply_pinned_drop = [&](const Drop& drop) {
    const int keep = row + 1 < rows ? risk.n_risk[row + 1] : 0;
    const Pick pick = best_pick(s_run, drop.target, n_cur, n_cur, keep);
    if (pick.n == 0) {
      fail("no feasible event count for the curve drop at time " + fmt(drop.time) +
           " (the table holds the at-risk count across it)");
    }
    if (pick.err > 0.5 / static_cast<double>(n_cur)) {
      fail("curve drop at time " + fmt(drop.time) +
           " cannot be matched at the risk-table row (nearest achievable survival misses by " +
           fmt(pick.err) + ")");
    }
    for (int i = 0; i < pick.d; ++i) out.emit(drop.time, true);
    s_run *= 1.0 - static_cast<double>(pick.d) / static_cast<double>(pick.n);
    n_cur -= pick.d;
    ++di;
  };

  if (di < drops.size() && drops[di].time == risk.times.front()) {
    apply_pinned_drop(drops[di]);
  }

  while (row + 1 < rows) {
    const double t_pin = risk.times[row + 1];
    if (di < drops.size() && drops[di].time < t_pin) {
      // Drop strictly inside the interval: both counts are free, subject to
      // leaving enough subjects for the next table row.
      const Drop& drop = drops[di];
      const int keep = risk.n_risk[row + 1];
      const Pick pick = best_pick(s_run, drop.target, keep + 1, n_cur, keep);
      if (pick.n == 0) {
        fail("no feasible event count for the curve drop at time " + fmt(drop.time) + " in " +
             interval_label() + " (the table holds the at-risk count across it)");
      }
      if (pick.err > 0.5 / static_cast<double>(n_cur)) {
        fail("curve drop at time " + fmt(drop.time) + " cannot be matched in " +
             interval_label() + " (nearest achievable survival misses by " + fmt(pick.err) +
             ")");
      }
      out.censor_between(n_cur - pick.n, cursor, drop.time);
      for (int i = 0; i < pick.d; ++i) out.emit(drop.time, true);
      s_run *= 1.0 - static_cast<double>(pick.d) / static_cast<double>(pick.n);
      n_cur = pick.n - pick.d;
      cursor = drop.time;
      ++di;
    } else {
      // Advance to the next table row; its count pins the at-risk set, and
      // any shortfall is attrition spread over the gap.
      const int pinned = risk.n_risk[row + 1];
      if (n_cur < pinned) {
        fail("risk table reports " + std::to_string(pinned) + " at risk at time " + fmt(t_pin) +
             " but only " + std::to_string(n_cur) + " remain");
      }
      out.censor_between(n_cur - pinned, cursor, t_pin);
      n_cur = pinned;
      cursor = t_pin;
      ++row;
      if (di < drops.size() && drops[di].time == t_pin) apply_pinned_drop(drops[di]);
    }
  }

  // Region beyond the last table row: censoring is unobservable, so it is
  // taken as zero unless a reported event total says otherwise, in which case
  // the smallest attrition count that reproduces the total is used.
  const auto tail_first = drops.cbegin() + static_cast<std::ptrdiff_t>(di);
  const auto tail_last = drops.cend();
  std::string tail_error;
  if (risk.total_events) {
    const long in_table = event_count(out.records);
    const long want = *risk.total_events - in_table;
    if (want < 0) {
      fail("reported total of " + std::to_string(*risk.total_events) +
           " events is below the " + std::to_string(in_table) +
           " already required by the risk table");
    }
    bool done = false;
    for (int extra = 0; extra <= std::max(n_cur - 1, 0) && !done; ++extra) {
      Builder trial;
      trial.arm = arm;
      double s = s_run;
      int n = n_cur - extra;
      if (extra > 0) {
        if (tail_first == tail_last || n < 1) break;
        trial.censor_between(extra, cursor, tail_first->time);
      }
      if (!build_tail(trial, tail_first, tail_last, s, n, &tail_error)) {
        if (extra == 0) fail(tail_error);
        break;  // more censoring only coarsens what the drops can match
      }
      if (event_count(trial.records) == want) {
        for (auto& rec : trial.records) out.records.push_back(std::move(rec));
        s_run = s;
        n_cur = n;
        done = true;
      }
    }
    if (!done) {
      fail("reported total of " + std::to_string(*risk.total_events) +
           " events cannot be reproduced beyond the last risk-table row");
    }
  } else if (!build_tail(out, tail_first, tail_last, s_run, n_cur, &tail_error)) {
    fail(tail_error);
  }

  // Whoever is left exits the study, censored, where the inputs end.
  const double final_time = std::max(ct.back(), risk.times.back());
  for (int i = 0; i < n_cur; ++i) out.emit(final_time, false);

  Dataset data;
  data.label = "reconstructed";
  data.records = std::move(out.records);
  std::stable_sort(data.records.begin(), data.records.end(),
                   [](const SubjectRecord& a, const SubjectRecord& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.event && !b.event;
                   });
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    data.records[i].id = "rec-" + std::to_string(i + 1);
  }
  return data;
}

Dataset lifetable_to_ipd(const LifeTable& table, Source source, Arm arm) {
  const std::size_t k = table.interval_starts.size();
  if (k == 0) throw std::invalid_argument("life table: no intervals");
  if (!(table.interval_width > 0.0)) throw std::invalid_argument("life table: bad width");
  if (table.n_risk.size() != k || table.n_events.size() != k || table.n_censored.size() != k) {
    throw std::invalid_argument("life table: column length mismatch");
  }

  for (std::size_t i = 0; i < k; ++i) {
    if (table.n_events[i] < 0 || table.n_censored[i] < 0 || table.n_risk[i] < 0) {
      throw std::invalid_argument("life table: negative count in the interval starting at " +
                                  fmt(table.interval_starts[i]));
    }
    const int leaving = table.n_events[i] + table.n_censored[i];
    if (leaving > table.n_risk[i]) {
      throw std::invalid_argument(
          "life table: more exits than subjects in the interval starting at " +
          fmt(table.interval_starts[i]));
    }
    if (i + 1 < k && table.n_risk[i + 1] != table.n_risk[i] - leaving) {
      throw std::invalid_argument(
          "life table: the at-risk count in the interval starting at " +
          fmt(table.interval_starts[i + 1]) + " does not follow from the previous row");
    }
  }

  Dataset data;
  data.label = "life-table";
  long next_id = 1;
  const auto emit = [&](double time, bool event) {
    SubjectRecord rec;
    rec.id = "lt-" + std::to_string(next_id++);
    rec.time = time;
    rec.event = event;
    rec.arm = arm;
    rec.source = source;
    rec.entry_time = 0.0;
    data.records.push_back(std::move(rec));
  };

  for (std::size_t i = 0; i < k; ++i) {
    const double midpoint = table.interval_starts[i] + 0.5 * table.interval_width;
    for (int d = 0; d < table.n_events[i]; ++d) emit(midpoint, true);
    for (int c = 0; c < table.n_censored[i]; ++c) emit(midpoint, false);
  }
  const int remaining = table.n_risk.back() - table.n_events.back() - table.n_censored.back();
  const double table_end = table.interval_starts.back() + table.interval_width;
  for (int i = 0; i < remaining; ++i) emit(table_end, false);
  return data;
}

}  // namespace survx
