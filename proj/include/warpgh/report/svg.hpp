#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "warpgh/core/error.hpp"
#include "warpgh/core/json_io.hpp"

namespace warpgh::report {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "r";
  std::string y_label;
  bool log_y = false;  ///< plots log10|y| for y != 0
  int width = 640;
  int height = 400;
};

namespace detail {

inline std::string escape_xml(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// Line plot of 1-D curves as SVG path elements. Non-finite samples break the path.
inline std::string svg_line_plot(const std::vector<Series>& series, const PlotOptions& o) {
  if (series.empty()) fail(ErrorKind::Validation, "cli_reports", "svg_line_plot", "no series");
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  auto ty = [&](double y) { return o.log_y ? (y == 0.0 ? std::nan("") : std::log10(std::fabs(y))) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) fail(ErrorKind::Validation, "cli_reports", "svg_line_plot", "series '" + s.name + "' has mismatched lengths");
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
      x0 = std::min(x0, s.x[i]), x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (!(x0 <= x1)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double L = 70, R = 20, T = 30, B = 45;
  const double w = o.width - L - R, h = o.height - T - B;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * w; };
  auto sy = [&](double y) { return T + (1.0 - (y - y0) / (y1 - y0)) * h; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << detail::px(L) << "\" y=\"20\" font-size=\"14\">" << detail::escape_xml(o.title) << "</text>\n";
  os << "<path d=\"M" << detail::px(L) << ' ' << detail::px(T) << " V" << detail::px(T + h) << " H" << detail::px(L + w)
     << "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << detail::px(sx(xv)) << "\" y=\"" << detail::px(T + h + 15) << "\" font-size=\"10\" text-anchor=\"middle\">"
       << fmt6(xv) << "</text>\n";
    os << "<text x=\"" << detail::px(L - 5) << "\" y=\"" << detail::px(sy(yv) + 3) << "\" font-size=\"10\" text-anchor=\"end\">"
       << fmt6(yv) << "</text>\n";
  }
  os << "<text x=\"" << detail::px(L + w / 2) << "\" y=\"" << detail::px(o.height - 8.0) << "\" font-size=\"12\" text-anchor=\"middle\">"
     << detail::escape_xml(o.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << detail::px(T + h / 2) << "\" font-size=\"12\" transform=\"rotate(-90 14 " << detail::px(T + h / 2)
     << ")\" text-anchor=\"middle\">" << detail::escape_xml(o.log_y ? "log10 " + o.y_label : o.y_label) << "</text>\n";
  for (size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 5];
    std::string d;
    bool pen = false;
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double y = ty(s.y[i]);
      if (!std::isfinite(s.x[i]) || !std::isfinite(y)) {
        pen = false;
        continue;
      }
      d += (pen ? " L" : " M") + detail::px(sx(s.x[i])) + ' ' + detail::px(sy(y));
      pen = true;
    }
    os << "<path d=\"" << d << "\" stroke=\"" << c << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
    os << "<text x=\"" << detail::px(L + w - 5) << "\" y=\"" << detail::px(T + 14.0 * (k + 1)) << "\" font-size=\"11\" fill=\"" << c
       << "\" text-anchor=\"end\">" << detail::escape_xml(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace warpgh::report
