#pragma once

#include <string>
#include <vector>

#include "survx/km.hpp"

namespace survx {

/// Static SVG survival plot: step curves for estimates, smooth polylines for
/// model curves, tick marks for external anchor points.
class SvgPlot {
 public:
  SvgPlot(double t_max, const std::string& title);

  void add_step_curve(const SurvivalCurve& curve, const std::string& label,
                      const std::string& color);
  void add_line_curve(const std::vector<double>& times, const std::vector<double>& survival,
                      const std::string& label, const std::string& color, bool dashed = false);
  void add_anchor_tick(double t, double s, const std::string& label);

  /// Writes the document; `header_comment` lands in an XML comment up top.
  void write(const std::string& path, const std::string& header_comment = {}) const;

 private:
  struct Series {
    std::vector<double> xs, ys;
    std::string label, color;
    bool step = false;
    bool dashed = false;
  };
  struct Tick {
    double t, s;
    std::string label;
  };

  double x_px(double t) const;
  double y_px(double s) const;

  double t_max_;
  std::string title_;
  std::vector<Series> series_;
  std::vector<Tick> ticks_;
};

}  // namespace survx
