#pragma once

#include <string>
#include <utility>
#include <vector>

namespace star {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Minimal deterministic SVG line chart: axes, ticks, one polyline per
/// series and a legend.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace star
