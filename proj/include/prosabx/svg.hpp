#pragma once

#include <string>
#include <utility>
#include <vector>

namespace prosabx::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Standalone SVG line chart, one polyline per series.
std::string line_plot(const std::vector<Series>& series, const PlotLabels& labels);

// Scatter with optional y = x reference line; `names` annotate points when non-empty.
std::string scatter_plot(const std::vector<std::pair<double, double>>& points,
                         const std::vector<std::string>& names, const PlotLabels& labels,
                         bool identity_line);

}  // namespace prosabx::svg
