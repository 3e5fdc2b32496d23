#include "acdb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace acdb {

namespace {

constexpr int kW = 720, kH = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b"};

std::string fmt(double v, const char* f = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool ok() const { return lo <= hi; }
};

}  // namespace

double least_squares_slope(const SvgSeries& s, bool log_x, bool log_y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
    double x = s.x[k], y = s.y[k];
    if (log_x) {
      if (!(x > 0)) continue;
      x = std::log10(x);
    }
    if (log_y) {
      if (!(y > 0)) continue;
      y = std::log10(y);
    }
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return 0.0;
  return (n * sxy - sx * sy) / den;
}

std::string render_line_plot(const std::vector<SvgSeries>& series, const SvgOptions& opt) {
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    if (opt.log_x && !(x > 0)) return false;
    if (opt.log_y && !(y > 0)) return false;
    return std::isfinite(x) && std::isfinite(y);
  };

  Range rx, ry;
  std::size_t points = 0;
  for (const SvgSeries& s : series)
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k)
      if (usable(s.x[k], s.y[k])) {
        rx.take(tx(s.x[k]));
        ry.take(ty(s.y[k]));
        ++points;
      }
  if (points == 0 || !rx.ok() || !ry.ok()) return {};
  if (rx.lo == rx.hi) {
    rx.lo -= 0.5;
    rx.hi += 0.5;
  }
  if (ry.lo == ry.hi) {
    ry.lo -= 0.5;
    ry.hi += 0.5;
  }
  double padx = 0.04 * (rx.hi - rx.lo), pady = 0.06 * (ry.hi - ry.lo);
  rx.lo -= padx;
  rx.hi += padx;
  ry.lo -= pady;
  ry.hi += pady;

  auto px = [&](double v) {
    return kMarginL + (tx(v) - rx.lo) / (rx.hi - rx.lo) * (kW - kMarginL - kMarginR);
  };
  auto py = [&](double v) {
    return kH - kMarginB - (ty(v) - ry.lo) / (ry.hi - ry.lo) * (kH - kMarginT - kMarginB);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kW) +
         "\" height=\"" + std::to_string(kH) + "\" viewBox=\"0 0 " + std::to_string(kW) +
         " " + std::to_string(kH) + "\">\n";
  if (!opt.comment.empty()) svg += "<!-- " + opt.comment + " -->\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // frame and ticks
  svg += "<g stroke=\"#333\" fill=\"none\" stroke-width=\"1\">\n";
  svg += "<rect x=\"" + std::to_string(kMarginL) + "\" y=\"" + std::to_string(kMarginT) +
         "\" width=\"" + std::to_string(kW - kMarginL - kMarginR) + "\" height=\"" +
         std::to_string(kH - kMarginT - kMarginB) + "\"/>\n";
  svg += "</g>\n<g font-family=\"monospace\" font-size=\"11\" fill=\"#222\">\n";
  const int nticks = 5;
  for (int k = 0; k <= nticks; ++k) {
    double fx = rx.lo + (rx.hi - rx.lo) * k / nticks;
    double vx = opt.log_x ? std::pow(10.0, fx) : fx;
    double X = kMarginL + (double)(kW - kMarginL - kMarginR) * k / nticks;
    svg += "<line x1=\"" + fmt(X) + "\" y1=\"" + std::to_string(kH - kMarginB) +
           "\" x2=\"" + fmt(X) + "\" y2=\"" + std::to_string(kH - kMarginB + 5) +
           "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fmt(X) + "\" y=\"" + std::to_string(kH - kMarginB + 18) +
           "\" text-anchor=\"middle\">" + fmt(vx, "%.3g") + "</text>\n";
    double fy = ry.lo + (ry.hi - ry.lo) * k / nticks;
    double vy = opt.log_y ? std::pow(10.0, fy) : fy;
    double Y = kH - kMarginB - (double)(kH - kMarginT - kMarginB) * k / nticks;
    svg += "<line x1=\"" + std::to_string(kMarginL - 5) + "\" y1=\"" + fmt(Y) + "\" x2=\"" +
           std::to_string(kMarginL) + "\" y2=\"" + fmt(Y) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + std::to_string(kMarginL - 8) + "\" y=\"" + fmt(Y + 4) +
           "\" text-anchor=\"end\">" + fmt(vy, "%.3g") + "</text>\n";
  }
  svg += "<text x=\"" + std::to_string(kW / 2) + "\" y=\"" + std::to_string(kH - 12) +
         "\" text-anchor=\"middle\">" + opt.xlabel + "</text>\n";
  svg += "<text x=\"16\" y=\"" + std::to_string(kH / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + std::to_string(kH / 2) +
         ")\">" + opt.ylabel + "</text>\n";
  svg += "<text x=\"" + std::to_string(kW / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-size=\"14\">" + opt.title + "</text>\n";
  svg += "</g>\n";

  int ci = 0;
  for (const SvgSeries& s : series) {
    const char* color = kPalette[ci % 6];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.x[k], s.y[k])) continue;
      pts += fmt(px(s.x[k])) + "," + fmt(py(s.y[k])) + " ";
    }
    if (!pts.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
      svg += "<text font-family=\"monospace\" font-size=\"11\" fill=\"" + std::string(color) +
             "\" x=\"" + std::to_string(kW - kMarginR - 160) + "\" y=\"" +
             std::to_string(kMarginT + 16 + 14 * ci) + "\">" + s.label + "</text>\n";
    }
    ++ci;
  }

  if (opt.annotate_slope && !series.empty()) {
    double slope = least_squares_slope(series[0], opt.log_x, opt.log_y);
    svg += "<!-- slope=" + fmt(slope, "%.12g") + " -->\n";
    svg += "<text font-family=\"monospace\" font-size=\"12\" fill=\"#444\" x=\"" +
           std::to_string(kMarginL + 10) + "\" y=\"" + std::to_string(kMarginT + 16) +
           "\">fitted slope: " + fmt(slope, "%.3f") + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace acdb
