#pragma once

// Self-contained SVG line plots: axes, ticks, legend, optional log scales and
// a least-squares slope annotation for convergence plots. No external
// renderer; the output is a plain polyline document.

#include <string>
#include <vector>

namespace acdb {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgOptions {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  bool annotate_slope = false;  // least-squares fit of the first series
  std::string comment;          // embedded as an SVG comment (manifest hash)
};

// Empty string when no finite points survive (callers warn and skip the file).
std::string render_line_plot(const std::vector<SvgSeries>& series, const SvgOptions& opt);

// Slope of the least-squares line of (x, y) after optional log10 transforms.
double least_squares_slope(const SvgSeries& s, bool log_x, bool log_y);

}  // namespace acdb
