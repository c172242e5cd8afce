// Copyright 2026 The Actionfield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "actionfield/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "actionfield/errors.hpp"

namespace actionfield {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotPanel>& panels, int width, int panel_height) {
  const int height = panel_height * static_cast<int>(std::max<std::size_t>(panels.size(), 1));
  const double margin_l = 60, margin_r = 140, margin_t = 24, margin_b = 24;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                  std::to_string(width) + "\" height=\"" + std::to_string(height) +
                  "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const auto& panel = panels[p];
    const double top = static_cast<double>(p) * panel_height;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& ser : panel.series) {
      for (double x : ser.x) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
      for (double y : ser.y) {
        if (!std::isfinite(y)) continue;
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
    if (!(xmax > xmin)) { xmin = 0; xmax = 1; }
    if (!(ymax > ymin)) { ymin -= 1; ymax += 1; }
    const double pw = width - margin_l - margin_r;
    const double ph = panel_height - margin_t - margin_b;
    auto px = [&](double x) { return margin_l + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return top + margin_t + (ymax - y) / (ymax - ymin) * ph; };

    s += "<text x=\"" + fmt(margin_l) + "\" y=\"" + fmt(top + 16) + "\">" +
         escape(panel.title) + "</text>\n";
    s += "<rect x=\"" + fmt(margin_l) + "\" y=\"" + fmt(top + margin_t) + "\" width=\"" +
         fmt(pw) + "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#999\"/>\n";
    s += "<text x=\"4\" y=\"" + fmt(top + margin_t + 10) + "\">" + fmt(ymax) + "</text>\n";
    s += "<text x=\"4\" y=\"" + fmt(top + margin_t + ph) + "\">" + fmt(ymin) + "</text>\n";
    for (std::size_t k = 0; k < panel.series.size(); ++k) {
      const auto& ser = panel.series[k];
      std::string pts;
      const std::size_t n = std::min(ser.x.size(), ser.y.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ser.y[i])) continue;
        pts += fmt(px(ser.x[i])) + "," + fmt(py(ser.y[i])) + " ";
      }
      s += "<polyline fill=\"none\" stroke=\"" + ser.color + "\" stroke-width=\"1.2\"" +
           (ser.dashed ? " stroke-dasharray=\"4,3\"" : "") + " points=\"" + pts + "\"/>\n";
      const double ly = top + margin_t + 12 + 14.0 * static_cast<double>(k);
      s += "<line x1=\"" + fmt(width - margin_r + 8) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" +
           fmt(width - margin_r + 28) + "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + ser.color +
           "\"/>\n";
      s += "<text x=\"" + fmt(width - margin_r + 32) + "\" y=\"" + fmt(ly) + "\">" +
           escape(ser.label) + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

void write_svg(const std::string& path, const std::vector<PlotPanel>& panels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("io.unwritable:" + path);
  out << render_svg(panels);
}

}  // namespace actionfield
