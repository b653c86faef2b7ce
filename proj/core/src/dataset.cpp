#include "survx/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "survx/csv.hpp"

namespace survx {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string to_string(Arm arm) { return arm == Arm::soc ? "SOC" : "EXPERIMENTAL"; }

std::string to_string(Source source) {
  switch (source) {
    case Source::rct: return "RCT";
    case Source::registry: return "REGISTRY";
    case Source::reconstructed: return "RECONSTRUCTED";
  }
  return "RCT";
}

Arm parse_arm(std::string_view text) {
  const std::string t = lower(text);
  if (t == "soc") return Arm::soc;
  if (t == "experimental") return Arm::experimental;
  throw std::invalid_argument("unknown arm '" + std::string(text) +
                              "' (expected SOC or EXPERIMENTAL)");
}

Source parse_source(std::string_view text) {
  const std::string t = lower(text);
  if (t == "rct") return Source::rct;
  if (t == "registry") return Source::registry;
  if (t == "reconstructed") return Source::reconstructed;
  throw std::invalid_argument("unknown source '" + std::string(text) + "'");
}

void validate_record(const SubjectRecord& rec, const std::string& context) {
  const std::string where = context.empty() ? "record '" + rec.id + "'" : context;
  if (!(rec.entry_time >= 0.0)) {
    throw std::invalid_argument(where + ": entry_time must be >= 0, got " +
                                std::to_string(rec.entry_time));
  }
  if (!(rec.time > rec.entry_time)) {
    throw std::invalid_argument(where + ": time must exceed entry_time (time=" +
                                std::to_string(rec.time) +
                                ", entry_time=" + std::to_string(rec.entry_time) + ")");
  }
}

std::size_t Dataset::event_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.event ? 1 : 0;
  return n;
}

double Dataset::max_time() const {
  if (records.empty()) throw std::invalid_argument("max_time of an empty dataset");
  double t = records.front().time;
  for (const auto& r : records) t = std::max(t, r.time);
  return t;
}

Dataset Dataset::filter_arm(Arm arm) const {
  Dataset out;
  out.label = label;
  for (const auto& r : records) {
    if (r.arm == arm) out.records.push_back(r);
  }
  return out;
}

void validate_anchor(const LongTermAnchor& anchor) {
  if (!(anchor.t_obs > 0.0)) throw std::invalid_argument("anchor: t_obs must be > 0");
  if (!(anchor.s_obs > 0.0 && anchor.s_obs < 1.0)) {
    throw std::invalid_argument("anchor: s_obs must lie in (0, 1)");
  }
  if (!(anchor.var_obs > 0.0)) throw std::invalid_argument("anchor: var_obs must be > 0");
  if (!(anchor.alpha >= 0.0 && anchor.alpha <= 2.0)) {
    throw std::invalid_argument("anchor: alpha must lie in [0, 2]");
  }
}

Dataset load_ipd(const std::string& path, const IpdColumns& columns) {
  const CsvTable table = read_csv(path);

  auto need = [&](const std::string& name) {
    auto idx = table.column(name);
    if (!idx) throw std::runtime_error(path + ": missing required column '" + name + "'");
    return *idx;
  };
  const std::size_t id_col = need(columns.id);
  const std::size_t time_col = need(columns.time);
  const std::size_t event_col = need(columns.event);
  const std::size_t arm_col = need(columns.arm);
  const auto entry_col = table.column(columns.entry_time);
  const auto source_col = table.column("source");

  Dataset data;
  data.label = path;
  data.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = path + " row " + std::to_string(table.line_numbers[i]);
    const std::size_t needed =
        std::max({id_col, time_col, event_col, arm_col, entry_col.value_or(0)});
    if (row.size() <= needed) throw std::runtime_error(where + ": too few columns");

    SubjectRecord rec;
    rec.id = row[id_col];
    rec.time = parse_double(row[time_col], where + " column '" + columns.time + "'");
    const long ev = parse_long(row[event_col], where + " column '" + columns.event + "'");
    if (ev != 0 && ev != 1) {
      throw std::runtime_error(where + ": event must be 0 or 1, got " + std::to_string(ev));
    }
    rec.event = ev == 1;
    try {
      rec.arm = parse_arm(row[arm_col]);
      if (source_col && row.size() > *source_col && !row[*source_col].empty()) {
        rec.source = parse_source(row[*source_col]);
      }
      if (entry_col && row.size() > *entry_col && !row[*entry_col].empty()) {
        rec.entry_time = parse_double(row[*entry_col], where);
      }
      validate_record(rec, where);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    data.records.push_back(std::move(rec));
  }
  return data;
}

void write_ipd_csv(const std::string& path, const Dataset& data,
                   const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "id,time,event,arm,entry_time,source\n";
  for (const auto& r : data.records) {
    out << r.id << ',' << format_double(r.time) << ',' << (r.event ? 1 : 0) << ','
        << to_string(r.arm) << ',' << format_double(r.entry_time) << ',' << to_string(r.source)
        << '\n';
  }
}

Dataset trim_at(const Dataset& data, double t_cut, TrimMode mode) {
  if (!(t_cut > 0.0)) throw std::invalid_argument("trim: cut time must be > 0");
  Dataset out;
  out.label = data.label;
  for (const auto& r : data.records) {
    if (r.entry_time >= t_cut) continue;  // never under observation inside the window
    if (r.time > t_cut) {
      if (mode == TrimMode::drop) continue;
      SubjectRecord cut = r;
      cut.time = t_cut;
      cut.event = false;
      out.records.push_back(std::move(cut));
    } else {
      out.records.push_back(r);
    }
  }
  return out;
}

Dataset trim_tail(const Dataset& data, double fraction, TrimMode mode) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("trim: fraction must lie in [0, 1)");
  }
  if (fraction == 0.0 || data.empty()) return data;
  return trim_at(data, (1.0 - fraction) * data.max_time(), mode);
}

Dataset blend(const Dataset& rct, const Dataset& registry, double join_time) {
  if (!(join_time >= 0.0)) throw std::invalid_argument("blend: join_time must be >= 0");
  Dataset out;
  out.label = rct.label;
  out.records = rct.records;
  for (const auto& r : registry.records) {
    if (r.time <= join_time) continue;  // fully inside the trial window
    SubjectRecord spliced = r;
    spliced.entry_time = std::max(r.entry_time, join_time);
    out.records.push_back(std::move(spliced));
  }
  if (out.records.empty()) {
    throw std::runtime_error(
        "blend: no records remain (empty trial data and no registry follow-up past "
        "the join time)");
  }
  return out;
}

}  // namespace survx
