// Copyright 2026 The sznet Authors.
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

#include "sznet/report.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "sznet/recording.h"

namespace sznet {

namespace {

constexpr const char* kPeriodColors[] = {"#4c78a8", "#e45756", "#54a24b"};
constexpr const char* kPeriodNames[] = {"pre", "ictal", "post"};

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {}

  void Line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double stroke_width = 1.0, std::string_view extra = "") {
    Add("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
        "stroke-width=\"{:.2f}\"{}/>",
        x1, y1, x2, y2, stroke, stroke_width, extra);
  }
  void Rect(double x, double y, double w, double h, std::string_view fill,
            std::string_view extra = "") {
    Add("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"{}/>", x,
        y, w, h, fill, extra);
  }
  void Circle(double cx, double cy, double r, std::string_view fill, std::string_view extra = "") {
    Add("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"{}/>", cx, cy, r, fill,
        extra);
  }
  void Text(double x, double y, std::string_view text, std::string_view anchor = "middle",
            double size = 12.0) {
    Add("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"{:.1f}\" text-anchor=\"{}\" "
        "font-family=\"sans-serif\">{}</text>",
        x, y, size, anchor, Escape(text));
  }
  void Polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke,
                double stroke_width = 1.5) {
    std::string p;
    for (const auto& [x, y] : pts) p += fmt::format("{:.2f},{:.2f} ", x, y);
    if (!p.empty()) p.pop_back();
    Add("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{:.2f}\"/>", p,
        stroke, stroke_width);
  }
  void Raw(std::string_view s) { body_ += s; body_ += '\n'; }

  std::string Finish(std::string_view title) const {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
        "viewBox=\"0 0 {0:.0f} {1:.0f}\">\n<title>{2}</title>\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{3}</svg>\n",
        width_, height_, Escape(title), body_);
  }

 private:
  template <typename... Args>
  void Add(fmt::format_string<Args...> f, Args&&... args) {
    fmt::format_to(std::back_inserter(body_), f, std::forward<Args>(args)...);
    body_ += '\n';
  }

  double width_;
  double height_;
  std::string body_;
};

// Linear map of [lo, hi] onto [a, b]; a degenerate range maps to the middle.
struct Scale {
  double lo, hi, a, b;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (a + b);
    return a + (v - lo) * (b - a) / (hi - lo);
  }
};

// Roughly five round tick values covering [lo, hi].
std::vector<double> Ticks(double lo, double hi) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

std::string Tick(double v) { return fmt::format("{:.4g}", v); }

void Axes(Svg& svg, const Scale& x, const Scale& y, std::string_view x_label,
          std::string_view y_label, bool integer_x = false) {
  svg.Line(x.a, y.a, x.b, y.a, "#333");
  svg.Line(x.a, y.a, x.a, y.b, "#333");
  for (double t : Ticks(x.lo, x.hi)) {
    if (integer_x && t != std::round(t)) continue;
    svg.Line(x(t), y.a, x(t), y.a + 4, "#333");
    svg.Text(x(t), y.a + 16, Tick(t), "middle", 10);
  }
  for (double t : Ticks(y.lo, y.hi)) {
    svg.Line(x.a - 4, y(t), x.a, y(t), "#333");
    svg.Text(x.a - 6, y(t) + 3, Tick(t), "end", 10);
  }
  svg.Text(0.5 * (x.a + x.b), y.a + 34, x_label);
  svg.Raw(fmt::format("<text x=\"14\" y=\"{:.2f}\" font-size=\"12.0\" text-anchor=\"middle\" "
                      "font-family=\"sans-serif\" transform=\"rotate(-90 14 {:.2f})\">{}</text>",
                      0.5 * (y.a + y.b), 0.5 * (y.a + y.b), Escape(y_label)));
}

int PeriodIndex(std::string_view name) {
  const auto p = ParsePeriod(name);
  return p ? static_cast<int>(*p) : -1;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Deterministic horizontal jitter for strip plots.
double Jitter(std::size_t i) {
  return std::fmod(static_cast<double>(i) * 0.6180339887498949, 1.0) - 0.5;
}

}  // namespace

std::string LossCurveSvg(const CsvTable& table, const std::string& title) {
  const std::size_t ck = table.Column("k");
  const std::size_t cl = table.Column("loss");
  const std::size_t cs = table.Column("selected");
  std::vector<std::pair<double, double>> pts;
  double selected = -1;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : table.rows) {
    const double k = ParseDouble(row[ck]);
    const double loss = ParseDouble(row[cl]);
    pts.push_back({k, loss});
    lo = std::min(lo, loss);
    hi = std::max(hi, loss);
    if (row[cs] == "1") selected = k;
  }
  Svg svg(560, 360);
  svg.Text(280, 22, title, "middle", 14);
  if (pts.empty()) return svg.Finish(title);
  const Scale x{pts.front().first, pts.back().first, 70, 530};
  const Scale y{std::min(0.0, lo), hi, 300, 40};
  Axes(svg, x, y, "number of clusters k", "loss", true);
  std::vector<std::pair<double, double>> mapped;
  for (const auto& [k, loss] : pts) mapped.push_back({x(k), y(loss)});
  svg.Polyline(mapped, "#4c78a8");
  for (const auto& [k, loss] : pts) {
    svg.Circle(x(k), y(loss), k == selected ? 6 : 3, k == selected ? "#e45756" : "#4c78a8");
  }
  if (selected > 0) {
    svg.Line(x(selected), y.a, x(selected), y.b, "#e45756", 1.0, " stroke-dasharray=\"4 3\"");
    svg.Text(x(selected) + 6, y.b + 12, fmt::format("k* = {}", selected), "start", 11);
  }
  return svg.Finish(title);
}

std::string StateTimelineSvg(const CsvTable& table, const std::string& title) {
  const std::size_t ct = table.Column("time_s");
  const std::size_t cp = table.Column("period");
  const std::size_t cs = table.Column("state");
  struct Point {
    double t;
    int period;
    double state;
  };
  std::vector<Point> pts;
  double max_state = 0;
  for (const auto& row : table.rows) {
    pts.push_back({ParseDouble(row[ct]), PeriodIndex(row[cp]), ParseDouble(row[cs])});
    max_state = std::max(max_state, pts.back().state);
  }
  Svg svg(760, 300);
  svg.Text(380, 22, title, "middle", 14);
  if (pts.empty()) return svg.Finish(title);
  const Scale x{pts.front().t, pts.back().t, 70, 730};
  const Scale y{-0.5, max_state + 0.5, 240, 50};
  // Period shading spans half a hop either side of each window centre.
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].period < 0) continue;
    const double left = i == 0 ? x.a : 0.5 * (x(pts[i - 1].t) + x(pts[i].t));
    const double right = i + 1 == pts.size() ? x.b : 0.5 * (x(pts[i].t) + x(pts[i + 1].t));
    svg.Rect(left, y.b, right - left, y.a - y.b, kPeriodColors[pts[i].period],
             " fill-opacity=\"0.12\"");
  }
  Axes(svg, x, y, "time (s)", "state");
  std::vector<std::pair<double, double>> steps;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) steps.push_back({x(pts[i].t), y(pts[i - 1].state)});
    steps.push_back({x(pts[i].t), y(pts[i].state)});
  }
  svg.Polyline(steps, "#333");
  for (int p = 0; p < 3; ++p) {
    svg.Rect(80 + 90 * p, 270, 10, 10, kPeriodColors[p], " fill-opacity=\"0.4\"");
    svg.Text(95 + 90 * p, 279, kPeriodNames[p], "start", 11);
  }
  return svg.Finish(title);
}

std::string TransitionDiagramSvg(const CsvTable& table, const std::string& title) {
  const std::size_t cf = table.Column("from");
  const std::size_t ct = table.Column("to");
  const std::size_t cp = table.Column("probability");
  std::size_t n = 0;
  struct Edge {
    std::size_t from, to;
    double p;
  };
  std::vector<Edge> edges;
  for (const auto& row : table.rows) {
    const auto from = static_cast<std::size_t>(ParseInteger(row[cf]));
    const auto to = static_cast<std::size_t>(ParseInteger(row[ct]));
    n = std::max({n, from + 1, to + 1});
    const double p = ParseDouble(row[cp]);
    if (p > 0.0) edges.push_back({from, to, p});
  }
  Svg svg(520, 520);
  svg.Text(260, 24, title, "middle", 14);
  svg.Raw(
      "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" "
      "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
      "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#555\"/></marker></defs>");
  const double cx = 260, cy = 280, radius = n > 1 ? 170 : 0, node = 26;
  const auto pos = [&](std::size_t i) {
    const double a = -std::numbers::pi / 2 + 2 * std::numbers::pi * i / std::max<std::size_t>(n, 1);
    return std::pair{cx + radius * std::cos(a), cy + radius * std::sin(a)};
  };
  for (const auto& e : edges) {
    const auto [x1, y1] = pos(e.from);
    const auto [x2, y2] = pos(e.to);
    const double width = 0.8 + 5.0 * e.p;
    if (e.from == e.to) {
      const double ox = x1 - cx, oy = y1 - cy;
      const double len = std::max(std::hypot(ox, oy), 1.0);
      const double ux = n > 1 ? ox / len : 0.0, uy = n > 1 ? oy / len : -1.0;
      const double lx = x1 + ux * (node + 18), ly = y1 + uy * (node + 18);
      svg.Circle(lx, ly, 18, "none", fmt::format(" stroke=\"#555\" stroke-width=\"{:.2f}\"", width));
      svg.Text(lx + ux * 30, ly + uy * 30 + 4, fmt::format("{:.2f}", e.p), "middle", 10);
      continue;
    }
    const double dx = x2 - x1, dy = y2 - y1, len = std::hypot(dx, dy);
    // Offset the two directions of a pair so they do not overlap.
    const double nx = -dy / len * 6, ny = dx / len * 6;
    const double sx = x1 + dx / len * node + nx, sy = y1 + dy / len * node + ny;
    const double ex = x2 - dx / len * node + nx, ey = y2 - dy / len * node + ny;
    svg.Line(sx, sy, ex, ey, "#555", width, " marker-end=\"url(#arrow)\"");
    svg.Text(0.5 * (sx + ex) + nx * 2, 0.5 * (sy + ey) + ny * 2 + 4, fmt::format("{:.2f}", e.p),
             "middle", 10);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x, y] = pos(i);
    svg.Circle(x, y, node, "#f2f2f2", " stroke=\"#333\" stroke-width=\"1.5\"");
    svg.Text(x, y + 4, fmt::format("S{}", i), "middle", 13);
  }
  return svg.Finish(title);
}

std::string RateDistributionSvg(const CsvTable& table, const std::string& title) {
  const std::size_t cb = table.Column("band");
  const std::size_t cp = table.Column("period");
  const std::size_t cr = table.Column("rate");
  std::vector<std::string> bands;
  std::map<std::string, std::array<std::vector<double>, 3>> values;
  double hi = 0.0;
  for (const auto& row : table.rows) {
    if (row[cr] == "NA") continue;
    const int p = PeriodIndex(row[cp]);
    if (p < 0) continue;
    if (!values.count(row[cb])) bands.push_back(row[cb]);
    const double v = ParseDouble(row[cr]);
    values[row[cb]][p].push_back(v);
    hi = std::max(hi, v);
  }
  const double panel = 150;
  Svg svg(std::max(300.0, 80 + panel * bands.size()), 360);
  svg.Text(std::max(300.0, 80 + panel * bands.size()) / 2, 22, title, "middle", 14);
  const Scale y{0.0, hi > 0 ? hi * 1.05 : 1.0, 300, 50};
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const double left = 70 + panel * b;
    const Scale x{0.0, 3.0, left, left + panel - 20};
    if (b == 0) Axes(svg, Scale{0, 1, 70, 70 + panel * bands.size() - 20}, y, "", "state changes / s");
    svg.Text(0.5 * (x.a + x.b), 332, bands[b], "middle", 11);
    for (int p = 0; p < 3; ++p) {
      const auto& v = values[bands[b]][p];
      const double cx = x(p + 0.5);
      for (std::size_t i = 0; i < v.size(); ++i) {
        svg.Circle(cx + 18 * Jitter(i), y(v[i]), 2.5, kPeriodColors[p], " fill-opacity=\"0.6\"");
      }
      if (!v.empty()) svg.Line(cx - 16, y(Median(v)), cx + 16, y(Median(v)), "#111", 2.0);
      svg.Text(cx, 316, kPeriodNames[p], "middle", 9);
    }
  }
  return svg.Finish(title);
}

std::string MetricComparisonSvg(const CsvTable& samples, const CsvTable& comparisons,
                                const std::string& metric, const std::string& title) {
  const std::size_t cb = samples.Column("band");
  const std::size_t cm = samples.Column("metric");
  const std::size_t cp = samples.Column("period");
  const std::size_t cv = samples.Column("value");
  std::vector<std::string> bands;
  std::map<std::string, std::array<std::vector<double>, 3>> values;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : samples.rows) {
    if (row[cm] != metric) continue;
    const int p = PeriodIndex(row[cp]);
    if (p < 0) continue;
    if (!values.count(row[cb])) bands.push_back(row[cb]);
    const double v = ParseDouble(row[cv]);
    values[row[cb]][p].push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::map<std::pair<std::string, std::string>, bool> significant;
  {
    const std::size_t kb = comparisons.Column("band");
    const std::size_t kp = comparisons.Column("pair");
    const std::size_t ks = comparisons.Column("significant");
    for (const auto& row : comparisons.rows) significant[{row[kb], row[kp]}] = row[ks] == "1";
  }
  const double panel = 150;
  const double width = std::max(300.0, 80 + panel * bands.size());
  Svg svg(width, 380);
  svg.Text(width / 2, 22, title, "middle", 14);
  if (bands.empty()) return svg.Finish(title);
  const double pad = hi > lo ? 0.15 * (hi - lo) : 1.0;
  const Scale y{lo - 0.05 * pad, hi + pad, 320, 50};
  Axes(svg, Scale{0, 1, 70, 70 + panel * bands.size() - 20}, y, "", metric);
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const double left = 70 + panel * b;
    const Scale x{0.0, 3.0, left, left + panel - 20};
    svg.Text(0.5 * (x.a + x.b), 352, bands[b], "middle", 11);
    for (int p = 0; p < 3; ++p) {
      const auto& v = values[bands[b]][p];
      const double cx = x(p + 0.5);
      for (std::size_t i = 0; i < v.size(); ++i) {
        svg.Circle(cx + 18 * Jitter(i), y(v[i]), 2.5, kPeriodColors[p], " fill-opacity=\"0.6\"");
      }
      if (!v.empty()) svg.Line(cx - 16, y(Median(v)), cx + 16, y(Median(v)), "#111", 2.0);
      svg.Text(cx, 336, kPeriodNames[p], "middle", 9);
    }
    const double top = y(hi) - 8;
    if (significant[{bands[b], "pre-ictal"}]) {
      svg.Line(x(0.5), top, x(1.5), top, "#111");
      svg.Text(x(1.0), top - 3, "*", "middle", 14);
    }
    if (significant[{bands[b], "ictal-post"}]) {
      svg.Line(x(1.5), top - 16, x(2.5), top - 16, "#111");
      svg.Text(x(2.0), top - 19, "*", "middle", 14);
    }
  }
  return svg.Finish(title);
}

}  // namespace sznet
