#include "survx/svg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "survx/csv.hpp"

namespace survx {

namespace {

// Fixed canvas; the plot area leaves room for the axes and the legend column.
constexpr double kWidth = 860.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 200.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

std::string escape_xml(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string px(double v) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

SvgPlot::SvgPlot(double t_max, const std::string& title) : t_max_(t_max), title_(title) {
  if (!(t_max > 0.0)) throw std::invalid_argument("svg plot: horizon must be positive");
}

double SvgPlot::x_px(double t) const {
  return kLeft + kPlotW * std::clamp(t / t_max_, 0.0, 1.0);
}

double SvgPlot::y_px(double s) const {
  return kTop + kPlotH * (1.0 - std::clamp(s, 0.0, 1.0));
}

void SvgPlot::add_step_curve(const SurvivalCurve& curve, const std::string& label,
                             const std::string& color) {
  Series series;
  series.xs = curve.times;
  series.ys = curve.survival;
  series.label = label;
  series.color = color;
  series.step = true;
  series_.push_back(std::move(series));
}

void SvgPlot::add_line_curve(const std::vector<double>& times,
                             const std::vector<double>& survival, const std::string& label,
                             const std::string& color, bool dashed) {
  if (times.size() != survival.size()) {
    throw std::invalid_argument("svg plot: time/survival length mismatch for '" + label + "'");
  }
  Series series;
  series.xs = times;
  series.ys = survival;
  series.label = label;
  series.color = color;
  series.dashed = dashed;
  series_.push_back(std::move(series));
}

void SvgPlot::add_anchor_tick(double t, double s, const std::string& label) {
  ticks_.push_back(Tick{t, s, label});
}

void SvgPlot::write(const std::string& path, const std::string& header_comment) const {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  if (!header_comment.empty()) {
    std::string safe = header_comment;
    // "--" terminates an XML comment early; soften it.
    std::size_t at = 0;
    while ((at = safe.find("--", at)) != std::string::npos) safe.replace(at, 2, "- -");
    os << "<!-- " << safe << " -->\n";
  }
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << px(kLeft) << "\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\""
     << " font-weight=\"bold\">" << escape_xml(title_) << "</text>\n";

  // Axes with a light grid; survival on [0,1], time on [0, t_max].
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 10; ++i) {
    const double s = static_cast<double>(i) / 10.0;
    const double y = y_px(s);
    os << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(y) << "\" x2=\""
       << px(kLeft + kPlotW) << "\" y2=\"" << px(y) << "\" stroke=\"#e5e5e5\"/>\n";
    os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(y + 4)
       << "\" text-anchor=\"end\">" << format_double(s) << "</text>\n";
  }
  const int x_ticks = 8;
  for (int i = 0; i <= x_ticks; ++i) {
    const double t = t_max_ * static_cast<double>(i) / static_cast<double>(x_ticks);
    const double x = x_px(t);
    os << "<line x1=\"" << px(x) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(x) << "\" y2=\""
       << px(kTop + kPlotH) << "\" stroke=\"#f0f0f0\"/>\n";
    os << "<text x=\"" << px(x) << "\" y=\"" << px(kTop + kPlotH + 18)
       << "\" text-anchor=\"middle\">" << format_double(t) << "</text>\n";
  }
  os << "<text x=\"" << px(kLeft + kPlotW / 2) << "\" y=\"" << px(kHeight - 14)
     << "\" text-anchor=\"middle\">time (months)</text>\n";
  os << "<text x=\"18\" y=\"" << px(kTop + kPlotH / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << px(kTop + kPlotH / 2)
     << ")\">survival</text>\n";
  os << "</g>\n";
  os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(kPlotW)
     << "\" height=\"" << px(kPlotH) << "\" fill=\"none\" stroke=\"#888\"/>\n";

  for (const Series& series : series_) {
    if (series.xs.empty()) continue;
    std::ostringstream pts;
    double last_y = y_px(1.0);
    if (series.step && (series.xs.front() > 0.0)) {
      pts << px(x_px(0.0)) << "," << px(last_y) << " ";
    }
    for (std::size_t i = 0; i < series.xs.size(); ++i) {
      if (series.xs[i] > t_max_) break;
      const double x = x_px(series.xs[i]);
      const double y = y_px(series.ys[i]);
      if (series.step) pts << px(x) << "," << px(last_y) << " ";
      pts << px(x) << "," << px(y) << " ";
      last_y = y;
    }
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << series.color
       << "\" stroke-width=\"1.6\"";
    if (series.dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n";
  }

  for (const Tick& tick : ticks_) {
    const double x = x_px(tick.t);
    const double y = y_px(tick.s);
    os << "<line x1=\"" << px(x) << "\" y1=\"" << px(y - 9) << "\" x2=\"" << px(x)
       << "\" y2=\"" << px(y + 9) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << px(x + 5) << "\" y=\"" << px(y - 12)
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(tick.label)
       << "</text>\n";
  }

  double legend_y = kTop + 10.0;
  for (const Series& series : series_) {
    const double x0 = kLeft + kPlotW + 16.0;
    os << "<line x1=\"" << px(x0) << "\" y1=\"" << px(legend_y) << "\" x2=\"" << px(x0 + 26)
       << "\" y2=\"" << px(legend_y) << "\" stroke=\"" << series.color
       << "\" stroke-width=\"2\"";
    if (series.dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n";
    os << "<text x=\"" << px(x0 + 32) << "\" y=\"" << px(legend_y + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(series.label)
       << "</text>\n";
    legend_y += 20.0;
  }

  os << "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << os.str();
  if (!file) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace survx
