#include "amglab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "amglab/errors.hpp"

namespace amglab {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
constexpr int kPaletteSize = 6;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_plot(const std::vector<SvgSeries>& series, const SvgPlotOptions& options) {
  const double W = options.width, H = options.height;
  const double ml = 70, mr = 20, mt = options.title.empty() ? 20 : 44, mb = 52;
  const double pw = W - ml - mr, ph = H - mt - mb;

  // Data ranges over the transformed coordinates.
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DimensionError("render_plot: series x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double yv = s.y[i];
      if (options.log_y && yv <= 0.0) continue;
      const double ty = options.log_y ? std::log10(yv) : yv;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, ty);
      ymax = std::max(ymax, ty);
    }
  }
  if (!(xmin <= xmax)) {  // no drawable points
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) {
    xmax += 0.5;
    xmin -= 0.5;
  }
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) {
    const double t = options.log_y ? std::log10(y) : y;
    return mt + (1.0 - (t - ymin) / (ymax - ymin)) * ph;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" viewBox=\"0 0 " << options.width << " " << options.height << "\">\n"
      << "<rect width=\"" << options.width << "\" height=\"" << options.height
      << "\" fill=\"white\"/>\n";

  if (!options.title.empty())
    svg << "<text x=\"" << fmt(W / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape_text(options.title)
        << "</text>\n";

  // Ticks and grid: 6 evenly spaced ticks in the transformed coordinates.
  const int n_ticks = 6;
  for (int t = 0; t < n_ticks; ++t) {
    const double fx = xmin + (xmax - xmin) * t / (n_ticks - 1);
    const double gx = px(fx);
    svg << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(gx)
        << "\" y2=\"" << fmt(mt + ph) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(mt + ph + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(fx)
        << "</text>\n";
    const double fy = ymin + (ymax - ymin) * t / (n_ticks - 1);
    const double gy = mt + (1.0 - static_cast<double>(t) / (n_ticks - 1)) * ph;
    const std::string label = options.log_y ? ("1e" + fmt(fy)) : fmt(fy);
    svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(gy) << "\" x2=\"" << fmt(ml + pw)
        << "\" y2=\"" << fmt(gy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
        << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(gy + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
  }

  // Axes.
  svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  if (!options.x_label.empty())
    svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 10)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_text(options.x_label) << "</text>\n";
  if (!options.y_label.empty())
    svg << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << fmt(mt + ph / 2) << ")\">"
        << escape_text(options.y_label) << "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color =
        s.color.empty() ? kPalette[si % kPaletteSize] : s.color;
    if (!s.points_only) {
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (options.log_y && s.y[i] <= 0.0) continue;
        if (!first) svg << " ";
        svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
        first = false;
      }
      svg << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (options.log_y && s.y[i] <= 0.0) continue;
      svg << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i]))
          << "\" r=\"" << (s.points_only ? "2.5" : "3") << "\" fill=\"" << color << "\"/>\n";
    }
  }

  // Legend, top right inside the plot area.
  double ly = mt + 16;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.label.empty()) continue;
    const std::string color = s.color.empty() ? kPalette[si % kPaletteSize] : s.color;
    svg << "<rect x=\"" << fmt(ml + pw - 150) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n"
        << "<text x=\"" << fmt(ml + pw - 133) << "\" y=\"" << fmt(ly + 2)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_text(s.label)
        << "</text>\n";
    ly += 18;
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_plot(const std::string& path, const std::vector<SvgSeries>& series,
                const SvgPlotOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_plot: cannot open " + path);
  out << render_plot(series, options);
}

}  // namespace amglab
