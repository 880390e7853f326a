// Copyright 2026 The OPE Toolkit Authors.
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

#include "ope/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ope {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double transform(double v) const { return log ? std::log10(v) : v; }
};

}  // namespace

std::string SvgChart::render() const {
  Axis ax{std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), log_x};
  Axis ay{ax.lo, ax.hi, log_y};
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) &&
           (!log_y || y > 0.0);
  };
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      ax.lo = std::min(ax.lo, ax.transform(x));
      ax.hi = std::max(ax.hi, ax.transform(x));
      ay.lo = std::min(ay.lo, ay.transform(y));
      ay.hi = std::max(ay.hi, ay.transform(y));
    }
  }
  if (!std::isfinite(ax.lo)) {
    ax.lo = ay.lo = 0.0;
    ax.hi = ay.hi = 1.0;
  }
  if (diagonal) {
    ax.lo = ay.lo = std::min(ax.lo, ay.lo);
    ax.hi = ay.hi = std::max(ax.hi, ay.hi);
  }
  for (Axis* a : {&ax, &ay}) {
    if (a->hi - a->lo < 1e-12) {
      a->lo -= 0.5;
      a->hi += 0.5;
    }
    const double pad = 0.05 * (a->hi - a->lo);
    a->lo -= pad;
    a->hi += pad;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (ax.transform(x) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (ay.transform(y) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
         "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(kLeft) + "\" y=\"22\" font-size=\"14\">" + escape(title) + "</text>\n";
  out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    const double vx = log_x ? std::pow(10.0, fx) : fx;
    const double vy = log_y ? std::pow(10.0, fy) : fy;
    const double sx = kLeft + pw * i / 4.0;
    const double sy = kTop + ph - ph * i / 4.0;
    out += "<text x=\"" + num(sx) + "\" y=\"" + num(kTop + ph + 16) +
           "\" text-anchor=\"middle\">" + label(vx) + "</text>\n";
    out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy + 4) +
           "\" text-anchor=\"end\">" + label(vy) + "</text>\n";
  }
  out += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">" + escape(x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + num(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
  if (diagonal) {
    const double lo = log_x ? std::pow(10.0, ax.lo) : ax.lo;
    const double hi = log_x ? std::pow(10.0, ax.hi) : ax.hi;
    out += "<line x1=\"" + num(px(lo)) + "\" y1=\"" + num(py(lo)) + "\" x2=\"" +
           num(px(hi)) + "\" y2=\"" + num(py(hi)) +
           "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const std::string color = kPalette[i % std::size(kPalette)];
    if (s.connect) {
      std::string pts;
      for (const auto& [x, y] : s.points) {
        if (!usable(x, y)) continue;
        if (!pts.empty()) pts += ' ';
        pts += num(px(x)) + "," + num(py(y));
      }
      out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    for (const auto& [x, y] : s.points) {
      if (!usable(x, y)) continue;
      out += "<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) +
             "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(i) + 8.0;
    out += "<rect x=\"" + num(kWidth - kRight + 12) + "\" y=\"" + num(ly - 7) +
           "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + num(kWidth - kRight + 28) + "\" y=\"" + num(ly + 2) +
           "\">" + escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace ope
