#pragma once

#include <string>
#include <vector>

namespace amglab {

// One plotted series: a polyline through (x, y) points, or markers only.
struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
  std::string color;       // empty picks from the default palette
  bool points_only = false;
};

struct SvgPlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // log10 axis; nonpositive values are skipped
  int width = 720;
  int height = 480;
};

// Self-contained SVG 1.1 document with axes, ticks, grid, and legend.
std::string render_plot(const std::vector<SvgSeries>& series, const SvgPlotOptions& options);

void write_plot(const std::string& path, const std::vector<SvgSeries>& series,
                const SvgPlotOptions& options);

}  // namespace amglab
