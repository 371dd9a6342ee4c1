// Copyright 2026 The SecPE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SECPE_SVG_HPP
#define SECPE_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace secpe {

// Minimal SVG line plot: axes, ticks, one polyline per series, legend.
// No plotting dependency; numbers are always dot-decimal.

struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

inline std::string svg_line_plot(const std::string& title,
                                 const std::string& x_label,
                                 const std::string& y_label,
                                 const std::vector<SvgSeries>& series,
                                 int width = 720, int height = 480) {
  const double ml = 70, mr = 20, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) {
    return mt + ph - (y - y_min) / (y_max - y_min) * ph;
  };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + detail::fmt_g(width / 2.0) +
         "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" +
         title + "</text>\n";

  // axes
  out += "<line x1=\"" + detail::fmt_g(ml) + "\" y1=\"" + detail::fmt_g(mt) +
         "\" x2=\"" + detail::fmt_g(ml) + "\" y2=\"" +
         detail::fmt_g(mt + ph) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::fmt_g(ml) + "\" y1=\"" +
         detail::fmt_g(mt + ph) + "\" x2=\"" + detail::fmt_g(ml + pw) +
         "\" y2=\"" + detail::fmt_g(mt + ph) + "\" stroke=\"black\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = x_min + (x_max - x_min) * i / ticks;
    double fy = y_min + (y_max - y_min) * i / ticks;
    out += "<line x1=\"" + detail::fmt_g(px(fx)) + "\" y1=\"" +
           detail::fmt_g(mt + ph) + "\" x2=\"" + detail::fmt_g(px(fx)) +
           "\" y2=\"" + detail::fmt_g(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::fmt_g(px(fx)) + "\" y=\"" +
           detail::fmt_g(mt + ph + 20) +
           "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">" +
           detail::fmt_g(fx) + "</text>\n";
    out += "<line x1=\"" + detail::fmt_g(ml - 5) + "\" y1=\"" +
           detail::fmt_g(py(fy)) + "\" x2=\"" + detail::fmt_g(ml) +
           "\" y2=\"" + detail::fmt_g(py(fy)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::fmt_g(ml - 9) + "\" y=\"" +
           detail::fmt_g(py(fy) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" "
           "font-family=\"sans-serif\">" +
           detail::fmt_g(fy) + "</text>\n";
  }
  out += "<text x=\"" + detail::fmt_g(ml + pw / 2) + "\" y=\"" +
         detail::fmt_g(height - 12.0) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">" +
         x_label + "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::fmt_g(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\" transform=\"rotate(-90 16 " +
         detail::fmt_g(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = colors[s % 4];
    std::string pts;
    for (auto [x, y] : series[s].points) {
      pts += detail::fmt_g(px(x)) + "," + detail::fmt_g(py(y)) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    for (auto [x, y] : series[s].points)
      out += "<circle cx=\"" + detail::fmt_g(px(x)) + "\" cy=\"" +
             detail::fmt_g(py(y)) + "\" r=\"2.6\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + detail::fmt_g(ml + pw - 8) + "\" y=\"" +
           detail::fmt_g(mt + 16.0 * (s + 1)) +
           "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + color +
           "\" font-family=\"sans-serif\">" + series[s].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace secpe

#endif  // SECPE_SVG_HPP
