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

#include "oodsim/analysis/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::analysis
{
namespace
{

using bus::kStageCount;

constexpr std::array<const char *, kStageCount - 1> kHopNames{
  "capture->ingest", "ingest->detect_done", "detect_done->estop_sent", "estop_sent->motor_zeroed"};

/// log P(Bin(n, 1/2) = k).
double log_binom_half(std::size_t n, std::size_t k)
{
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) - nn * std::log(2.0);
}

std::vector<double> sorted(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  return v;
}

double seconds(Timestamp a, Timestamp b)
{
  return to_seconds(b - a);
}

}  // namespace

double position_at(std::span<const sim::MotionSample> motion, Timestamp t)
{
  if (motion.empty()) {
    throw ValidationError("motion trace is empty");
  }
  const auto it = std::upper_bound(
    motion.begin(), motion.end(), t, [](Timestamp value, const sim::MotionSample & s) { return value < s.t; });
  if (it == motion.begin()) {
    return motion.front().x;
  }
  const auto & s = *std::prev(it);
  return s.x + s.v * to_seconds(t - s.t);
}

std::optional<Timestamp> motion_start(std::span<const sim::MotionSample> motion)
{
  for (const auto & s : motion) {
    if (s.v > 0.0) {
      return s.t;
    }
  }
  return std::nullopt;
}

double velocity_estimate(const sim::RunLog & log)
{
  const auto start = motion_start(log.motion);
  if (!start) {
    throw ValidationError("run never moved; no velocity estimate");
  }
  const Timestamp halt = log.summary.estop_ts.value_or(log.summary.end_ts);
  if (halt <= *start) {
    throw ValidationError("zero elapsed time between first motion and e-stop");
  }
  const double dx = position_at(log.motion, halt) - position_at(log.motion, *start);
  if (!(dx > 0.0)) {
    throw ValidationError("no distance travelled before the e-stop");
  }
  return dx / to_seconds(halt - *start);
}

double median(std::vector<double> values)
{
  if (values.empty()) {
    throw ValidationError("median of an empty sample");
  }
  const auto v = sorted(std::move(values));
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double nearest_rank(std::vector<double> values, double q)
{
  if (values.empty()) {
    throw ValidationError("percentile of an empty sample");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw ValidationError(fmt::format("percentile q must lie in (0, 1], got {}", q));
  }
  const auto v = sorted(std::move(values));
  const double pos = q * static_cast<double>(v.size());
  auto rank = static_cast<std::size_t>(std::ceil(pos - 1e-9 * pos));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

std::pair<std::size_t, std::size_t> median_ci_ranks(std::size_t n, double confidence)
{
  if (n == 0) {
    throw ValidationError("confidence interval of an empty sample");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ValidationError(fmt::format("confidence must lie in (0, 1), got {}", confidence));
  }
  const double alpha_half = 0.5 * (1.0 - confidence);
  std::size_t lo = 0;
  double cdf = 0.0;
  // P(B <= j - 1) for j = 1, 2, ... ; keep the largest j within alpha/2.
  for (std::size_t j = 1; j <= (n + 1) / 2; ++j) {
    cdf += std::exp(log_binom_half(n, j - 1));
    if (cdf <= alpha_half) {
      lo = j;
    } else {
      break;
    }
  }
  if (lo == 0) {
    return {1, n};
  }
  return {lo, n - lo + 1};
}

StoppingStats stopping_stats(std::span<const double> distances, std::span<const bool> collisions)
{
  if (distances.empty()) {
    throw ValidationError("stopping statistics need at least one run");
  }
  if (distances.size() != collisions.size()) {
    throw ValidationError("distances and collision flags differ in length");
  }
  StoppingStats s;
  s.runs = distances.size();
  s.collisions = static_cast<std::size_t>(std::count(collisions.begin(), collisions.end(), true));
  const auto v = sorted({distances.begin(), distances.end()});
  s.median = median(v);
  const auto [lo, hi] = median_ci_ranks(v.size());
  s.ci_low_rank = lo;
  s.ci_high_rank = hi;
  s.ci_low = v[lo - 1];
  s.ci_high = v[hi - 1];
  s.success_rate = 1.0 - static_cast<double>(s.collisions) / static_cast<double>(s.runs);
  return s;
}

StoppingStats stopping_stats(std::span<const sim::RunLog> logs)
{
  std::vector<double> d;
  d.reserve(logs.size());
  // std::vector<bool> is not contiguous, so use a plain array for the span.
  auto c = std::make_unique<bool[]>(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    d.push_back(logs[i].summary.stopping_distance_m);
    c[i] = logs[i].summary.collision;
  }
  return stopping_stats(d, std::span<const bool>(c.get(), logs.size()));
}

LatencyStats summarize_latency(std::string name, std::vector<double> samples)
{
  if (samples.empty()) {
    throw ValidationError(fmt::format("no samples for '{}'", name));
  }
  LatencyStats s;
  s.name = std::move(name);
  const auto v = sorted(samples);
  s.min = v.front();
  s.max = v.back();
  s.median = median(v);
  s.p95 = nearest_rank(v, 0.95);
  s.samples = std::move(samples);
  return s;
}

TimingSummary timing_report(std::span<const bus::StageLog> logs)
{
  if (logs.empty()) {
    throw ValidationError("timing report needs at least one log");
  }
  std::array<std::vector<double>, kStageCount - 1> hops;
  std::vector<double> e2e;
  for (std::size_t li = 0; li < logs.size(); ++li) {
    const auto & log = logs[li];
    for (const auto seq : log.sequences()) {
      const auto t = log.times(seq);
      for (std::size_t j = 1; j < kStageCount; ++j) {
        if (t[j] && !t[j - 1]) {
          throw ValidationError(fmt::format(
            "log {} frame {}: stage {} recorded without {}", li, seq, bus::to_string(bus::kAllStages[j]),
            bus::to_string(bus::kAllStages[j - 1])));
        }
        if (t[j] && *t[j] < *t[j - 1]) {
          throw OrderingError(fmt::format(
            "log {} frame {}: stage {} precedes {}", li, seq, bus::to_string(bus::kAllStages[j]),
            bus::to_string(bus::kAllStages[j - 1])));
        }
        if (t[j]) {
          hops[j - 1].push_back(seconds(*t[j - 1], *t[j]));
        }
      }
      if (t[kStageCount - 1]) {
        e2e.push_back(seconds(*t[0], *t[kStageCount - 1]));
      }
    }
  }
  if (e2e.empty()) {
    throw ValidationError("no frame carries all five stages (missing stage events)");
  }
  TimingSummary out;
  double best = -1.0;
  for (std::size_t j = 0; j < hops.size(); ++j) {
    out.hops.push_back(summarize_latency(kHopNames[j], std::move(hops[j])));
    if (out.hops.back().median > best) {
      best = out.hops.back().median;
      out.dominant = out.hops.back().name;
    }
  }
  out.end_to_end = summarize_latency("capture->motor_zeroed", std::move(e2e));
  return out;
}

TimingSummary timing_report(std::span<const sim::RunLog> logs)
{
  std::vector<bus::StageLog> stages;
  stages.reserve(logs.size());
  for (const auto & log : logs) {
    stages.push_back(log.stages);
  }
  return timing_report(std::span<const bus::StageLog>(stages));
}

Projection project_run(const sim::RunLog & log, double tau)
{
  const auto & cfg = log.config;
  Projection p;
  const auto start = motion_start(log.motion);
  if (!start) {
    throw ValidationError("run never moved; cannot project stopping distance");
  }
  const double v_hat = velocity_estimate(log);
  double hop = cfg.estop_latency_s;
  if (log.summary.trigger_seq) {
    const auto t = log.stages.times(*log.summary.trigger_seq);
    if (t[2] && t[4]) {
      hop = seconds(*t[2], *t[4]);
    }
  }
  for (const auto & f : log.scores) {
    if (f.score > tau) {
      p.trigger_seq = f.seq;
      const double stop_x = v_hat * (seconds(*start, f.complete) + hop) + cfg.coast_m;
      p.distance_m = std::max(0.0, cfg.d_obs_m - stop_x);
      const double capture_x = v_hat * std::max(0.0, seconds(*start, f.capture));
      p.out_of_risk = cfg.d_obs_m - capture_x > cfg.risk_m;
      return p;
    }
  }
  p.distance_m = 0.0;
  return p;
}

SweepResult threshold_sweep(std::span<const sim::RunLog> logs, std::vector<double> thresholds)
{
  if (thresholds.empty()) {
    throw ValidationError("threshold list is empty");
  }
  if (logs.empty()) {
    throw ValidationError("threshold sweep needs at least one run");
  }
  for (const double t : thresholds) {
    if (!std::isfinite(t)) {
      throw ValidationError(fmt::format("threshold {} is not finite", t));
    }
  }
  std::sort(thresholds.begin(), thresholds.end());
  SweepResult r;
  r.runs = logs.size();
  r.thresholds = thresholds;
  r.distances.assign(thresholds.size(), std::vector<double>(logs.size(), 0.0));
  r.collisions.assign(thresholds.size(), 0);
  r.out_of_risk.assign(thresholds.size(), 0);
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    for (std::size_t ri = 0; ri < logs.size(); ++ri) {
      const Projection p = project_run(logs[ri], thresholds[ti]);
      r.distances[ti][ri] = p.distance_m;
      r.collisions[ti] += p.distance_m <= 0.0 ? 1 : 0;
      r.out_of_risk[ti] += p.out_of_risk ? 1 : 0;
    }
  }
  check_sweep_monotone(r);
  return r;
}

void check_sweep_monotone(const SweepResult & s)
{
  for (std::size_t ti = 1; ti < s.thresholds.size(); ++ti) {
    if (s.thresholds[ti] < s.thresholds[ti - 1]) {
      throw InvariantViolation("sweep thresholds are not ascending");
    }
    for (std::size_t ri = 0; ri < s.runs; ++ri) {
      if (s.distances[ti][ri] > s.distances[ti - 1][ri]) {
        throw InvariantViolation(fmt::format(
          "run {}: projected distance rises from {} m at tau {} to {} m at tau {}", ri, s.distances[ti - 1][ri],
          s.thresholds[ti - 1], s.distances[ti][ri], s.thresholds[ti]));
      }
    }
    if (s.out_of_risk[ti] > s.out_of_risk[ti - 1]) {
      throw InvariantViolation(fmt::format(
        "out-of-risk trigger count rises from {} at tau {} to {} at tau {}", s.out_of_risk[ti - 1],
        s.thresholds[ti - 1], s.out_of_risk[ti], s.thresholds[ti]));
    }
  }
}

}  // namespace oodsim::analysis
