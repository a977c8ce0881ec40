// Copyright 2026 The SharpZO Authors.
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

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace sharpzo::cli {
namespace {

constexpr double kWidth = 880, kHeight = 520;
constexpr double kLeft = 78, kRight = 690, kTop = 46, kBottom = 462;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v, const char* fmt = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string escape(const std::string& s) {
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

// Tick positions with a 1/2/5 mantissa covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  double range = hi - lo;
  if (!(range > 0)) return {lo};
  double raw = range / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 1e-9 * range; v += step) {
    ticks.push_back(v);
  }
  return ticks;
}

}  // namespace

std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<ChartSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  bool log_y = true;
  for (const ChartSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      for (double v : {s.median[i], s.lo[i], s.hi[i]}) {
        if (!std::isfinite(v)) continue;
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
        if (v <= 0.0) log_y = false;
      }
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
    }
  }
  if (!std::isfinite(x_min)) {  // nothing to draw
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
    log_y = false;
  }
  if (x_max == x_min) x_max = x_min + 1;

  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  double t_lo = ty(y_min), t_hi = ty(y_max);
  if (t_hi == t_lo) {
    t_lo -= 0.5;
    t_hi += 0.5;
  } else {
    double pad = 0.04 * (t_hi - t_lo);
    t_lo -= pad;
    t_hi += pad;
  }

  auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft);
  };
  auto py = [&](double v) {
    return kBottom - (ty(v) - t_lo) / (t_hi - t_lo) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") +
         "\" height=\"" + num(kHeight, "%.0f") + "\" viewBox=\"0 0 " +
         num(kWidth, "%.0f") + " " + num(kHeight, "%.0f") + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\" fill=\"#222\">" +
         escape(title) + "</text>\n";

  // Axis ticks and grid.
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  for (double x : nice_ticks(x_min, x_max)) {
    double gx = px(x);
    svg += "<line x1=\"" + num(gx) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(gx) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"#e5e5e5\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(gx) + "\" y=\"" + num(kBottom + 16) +
           "\" text-anchor=\"middle\">" + num(x, "%.6g") + "</text>\n";
  }
  std::vector<double> y_tick_values;
  if (log_y) {
    int d0 = static_cast<int>(std::ceil(t_lo));
    int d1 = static_cast<int>(std::floor(t_hi));
    if (d1 - d0 >= 1) {
      for (int d = d0; d <= d1; ++d) {
        y_tick_values.push_back(std::pow(10.0, d));
      }
    } else {
      for (int i = 0; i <= 4; ++i) {
        y_tick_values.push_back(
            std::pow(10.0, t_lo + (t_hi - t_lo) * i / 4.0));
      }
    }
  } else {
    y_tick_values = nice_ticks(t_lo, t_hi);
  }
  for (double v : y_tick_values) {
    double gy = py(v);
    if (gy < kTop - 0.5 || gy > kBottom + 0.5) continue;
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(kRight) +
           "\" y2=\"" + num(gy) + "\" stroke=\"#e5e5e5\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(gy + 4) +
           "\" text-anchor=\"end\">" + num(v, "%.3g") + "</text>\n";
  }
  svg += "</g>\n";

  // Bands then curves, so every curve stays visible.
  for (std::size_t k = 0; k < series.size(); ++k) {
    const ChartSeries& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (s.x.empty()) continue;
    std::string path = "M";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      path += " " + num(px(s.x[i])) + " " + num(py(s.lo[i]));
      if (i == 0) path += " L";
    }
    for (std::size_t i = s.x.size(); i-- > 0;) {
      path += " L " + num(px(s.x[i])) + " " + num(py(s.hi[i]));
    }
    path += " Z";
    svg += "<path d=\"" + path + "\" fill=\"" + color +
           "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const ChartSeries& s = series[k];
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (s.x.empty()) continue;
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!points.empty()) points += " ";
      points += num(px(s.x[i])) + "," + num(py(s.median[i]));
    }
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.8\"/>\n";
  }

  // Frame.
  svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
         num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // Axis labels.
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#222\">" + escape(x_label) + "</text>\n";
  svg += "<text x=\"20\" y=\"" + num((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#222\" transform=\"rotate(-90 20 " + num((kTop + kBottom) / 2) +
         ")\">" + escape(y_label) + "</text>\n";

  // Legend.
  double ly = kTop + 6;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg += "<line x1=\"" + num(kRight + 14) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kRight + 38) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + num(kRight + 44) + "\" y=\"" + num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">" +
           escape(series[k].label) + "</text>\n";
    ly += 20;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace sharpzo::cli
