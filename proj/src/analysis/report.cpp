// Copyright 2026 The oodsim Authors
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

#include "oodsim/analysis/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::analysis
{
namespace
{

using nlohmann::json;

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

constexpr std::array<const char *, 8> kPalette{
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Axis
{
  double lo;
  double hi;
  double px_lo;
  double px_hi;

  double map(double v) const
  {
    const double span = hi > lo ? hi - lo : 1.0;
    return px_lo + (v - lo) / span * (px_hi - px_lo);
  }
};

std::string svg_open(const std::string & title)
{
  return fmt::format(
    "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
    "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    "<text x=\"{2}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{3}</text>\n",
    kWidth, kHeight, kWidth / 2, title);
}

std::string axes(const Axis & x, const Axis & y, const std::string & xlabel, const std::string & ylabel)
{
  std::string s = fmt::format(
    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
    x.px_lo, y.px_lo, x.px_hi, y.px_hi);
  for (int i = 0; i <= 4; ++i) {
    const double xv = x.lo + (x.hi - x.lo) * i / 4.0;
    const double yv = y.lo + (y.hi - y.lo) * i / 4.0;
    s += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.3g}</text>\n",
      x.map(xv), y.px_lo + 14, xv);
    s += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
      x.px_lo - 4, y.map(yv) + 3, yv);
  }
  s += fmt::format(
    "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
    (x.px_lo + x.px_hi) / 2, kHeight - 8, xlabel);
  s += fmt::format(
    "<text x=\"14\" y=\"{0:.1f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
    "transform=\"rotate(-90 14 {0:.1f})\">{1}</text>\n",
    (y.px_lo + y.px_hi) / 2, ylabel);
  return s;
}

}  // namespace

json to_json(const StoppingStats & s)
{
  return {
    {"runs", s.runs},
    {"collisions", s.collisions},
    {"success_rate", s.success_rate},
    {"median_stopping_distance_m", s.median},
    {"ci95_low_m", s.ci_low},
    {"ci95_high_m", s.ci_high},
    {"ci95_ranks", {s.ci_low_rank, s.ci_high_rank}}};
}

json to_json(const LatencyStats & s)
{
  return {
    {"name", s.name}, {"n", s.samples.size()}, {"min_s", s.min}, {"median_s", s.median}, {"p95_s", s.p95}, {"max_s", s.max}};
}

json to_json(const TimingSummary & t)
{
  json hops = json::array();
  for (const auto & h : t.hops) {
    hops.push_back(to_json(h));
  }
  return {{"hops", hops}, {"end_to_end", to_json(t.end_to_end)}, {"dominant", t.dominant}};
}

json to_json(const SweepResult & s)
{
  json rows = json::array();
  for (std::size_t ti = 0; ti < s.thresholds.size(); ++ti) {
    const auto & d = s.distances[ti];
    rows.push_back({
      {"threshold", s.thresholds[ti]},
      {"median_m", median(d)},
      {"min_m", *std::min_element(d.begin(), d.end())},
      {"max_m", *std::max_element(d.begin(), d.end())},
      {"collisions", s.collisions[ti]},
      {"out_of_risk", s.out_of_risk[ti]}});
  }
  return {{"runs", s.runs}, {"thresholds", rows}};
}

void write_sweep_csv(std::ostream & out, const SweepResult & s)
{
  out << "threshold,run,projected_distance_m\n";
  for (std::size_t ti = 0; ti < s.thresholds.size(); ++ti) {
    for (std::size_t ri = 0; ri < s.runs; ++ri) {
      out << fmt::format("{},{},{}\n", s.thresholds[ti], ri, s.distances[ti][ri]);
    }
  }
}

void write_timing_csv(std::ostream & out, const TimingSummary & t)
{
  out << "hop,n,min_s,median_s,p95_s,max_s\n";
  auto row = [&](const LatencyStats & h) {
    out << fmt::format("{},{},{},{},{},{}\n", h.name, h.samples.size(), h.min, h.median, h.p95, h.max);
  };
  for (const auto & h : t.hops) {
    row(h);
  }
  row(t.end_to_end);
}

std::string score_distance_svg(std::span<const sim::RunLog> logs)
{
  if (logs.empty()) {
    throw ValidationError("no runs to plot");
  }
  double d_max = 0.0;
  double s_lo = logs.front().threshold;
  double s_hi = logs.front().threshold;
  for (const auto & log : logs) {
    d_max = std::max(d_max, log.config.d_obs_m);
    for (const auto & f : log.scores) {
      s_lo = std::min(s_lo, f.score);
      s_hi = std::max(s_hi, f.score);
    }
  }
  const Axis x{d_max, 0.0, kMargin, kWidth - kMargin / 2};
  const Axis y{s_lo, s_hi, kHeight - kMargin, kMargin};
  std::string s = svg_open("OOD score vs distance to obstacle");
  s += axes(x, y, "distance to obstacle at capture (m)", "OOD score");
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto & log = logs[i];
    std::string pts;
    for (const auto & f : log.scores) {
      pts += fmt::format("{:.2f},{:.2f} ", x.map(log.config.d_obs_m - f.capture_x), y.map(f.score));
    }
    s += fmt::format(
      "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"{}\"/>\n", kPalette[i % kPalette.size()], pts);
  }
  const double ty = y.map(logs.front().threshold);
  s += fmt::format(
    "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n", x.px_lo, ty,
    x.px_hi, ty);
  s += "</svg>\n";
  return s;
}

std::string sweep_box_svg(const SweepResult & sweep)
{
  if (sweep.thresholds.empty()) {
    throw ValidationError("no thresholds to plot");
  }
  double d_hi = 0.0;
  for (const auto & row : sweep.distances) {
    d_hi = std::max(d_hi, *std::max_element(row.begin(), row.end()));
  }
  const std::size_t n = sweep.thresholds.size();
  const Axis x{0.0, static_cast<double>(n), kMargin, kWidth - kMargin / 2};
  const Axis y{0.0, std::max(d_hi, 1e-6), kHeight - kMargin, kMargin};
  std::string s = svg_open("Projected stopping distance per threshold");
  s += fmt::format(
    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\" stroke=\"black\"/>\n",
    x.px_lo, y.px_lo, x.px_hi, y.px_hi);
  const double box_w = 0.6 * (x.map(1.0) - x.map(0.0));
  for (std::size_t ti = 0; ti < n; ++ti) {
    const auto & d = sweep.distances[ti];
    const double q1 = nearest_rank(d, 0.25);
    const double q2 = median(d);
    const double q3 = nearest_rank(d, 0.75);
    const double lo = *std::min_element(d.begin(), d.end());
    const double hi = *std::max_element(d.begin(), d.end());
    const double cx = x.map(ti + 0.5);
    s += fmt::format(
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n", cx, y.map(lo), y.map(hi));
    s += fmt::format(
      "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#9ecae1\" stroke=\"black\"/>\n",
      cx - box_w / 2, y.map(q3), box_w, std::max(0.5, y.map(q1) - y.map(q3)));
    s += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
      cx - box_w / 2, y.map(q2), cx + box_w / 2, y.map(q2));
    s += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{:.4g}</text>\n",
      cx, y.px_lo + 14, sweep.thresholds[ti]);
  }
  for (int i = 0; i <= 4; ++i) {
    const double v = y.hi * i / 4.0;
    s += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{:.3g}</text>\n",
      x.px_lo - 4, y.map(v) + 3, v);
  }
  s += fmt::format(
    "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">threshold</text>\n",
    (x.px_lo + x.px_hi) / 2, kHeight - 8);
  s += "</svg>\n";
  return s;
}

}  // namespace oodsim::analysis
