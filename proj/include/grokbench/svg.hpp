#pragma once

#include <string>
#include <vector>

#include "grokbench/linalg.hpp"

namespace grokbench {

struct LineChartOptions {
  std::string title;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

/// Single-series line chart as a self-contained SVG document.
std::string line_chart_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                           const LineChartOptions& opts);

struct HeatmapOptions {
  std::string title;
  bool hide_diagonal = false;  // blank the main diagonal before scaling
  int cell = 4;
};

/// Linear grayscale heatmap (white = min, black = max).
std::string heatmap_svg(const Matrix& m, const HeatmapOptions& opts);

}  // namespace grokbench
