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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oodsim/analysis/analysis.hpp"
#include "oodsim/analysis/report.hpp"
#include "oodsim/core/error.hpp"
#include "oodsim/sim/engine.hpp"

namespace oodsim::analysis
{
namespace
{

Timestamp sec(double s)
{
  return from_seconds(s);
}

sim::RunLog straight_log(double v, double t_stop)
{
  sim::RunLog log;
  log.motion = {{sec(0.0), 0.0, v}, {sec(t_stop), v * t_stop, 0.0}};
  log.summary.estop_ts = sec(t_stop);
  log.summary.end_ts = sec(t_stop);
  return log;
}

// ---- velocity

TEST(Velocity, ConstantSpeed)
{
  auto log = straight_log(0.2, 2.5);
  EXPECT_NEAR(log.motion.back().x, 0.5, 1e-15);
  EXPECT_NEAR(velocity_estimate(log), 0.2, 1e-12);
}

TEST(Velocity, NoMotionIsAnError)
{
  sim::RunLog log;
  log.motion = {{sec(0.0), 0.0, 0.0}, {sec(1.0), 0.0, 0.0}};
  log.summary.end_ts = sec(1.0);
  EXPECT_THROW(velocity_estimate(log), ValidationError);
  log.motion.clear();
  EXPECT_THROW(velocity_estimate(log), ValidationError);
}

TEST(Velocity, PiecewiseProfileMatchesIntegralMean)
{
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> speed(0.05, 0.4), dt(0.05, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    sim::RunLog log;
    double t = 0.3, x = 0.0, integral = 0.0;
    log.motion.push_back({sec(0.0), 0.0, 0.0});
    const int pieces = 2 + trial % 7;
    for (int i = 0; i < pieces; ++i) {
      const double v = speed(rng);
      const double d = std::round(dt(rng) * 1e3) / 1e3;
      log.motion.push_back({sec(t), x, v});
      x += v * d;
      integral += v * d;
      t += d;
    }
    log.motion.push_back({sec(t), x, 0.0});
    log.summary.estop_ts = sec(t);
    EXPECT_NEAR(velocity_estimate(log), integral / (t - 0.3), 1e-9);
  }
}

// ---- stopping statistics

TEST(Stopping, MedianOfThree)
{
  const std::vector<double> d{0.20, 0.10, 0.145};
  const bool c[] = {false, false, false};
  EXPECT_EQ(stopping_stats(d, c).median, 0.145);
  EXPECT_EQ(median({1.0, 3.0, 2.0, 4.0}), 2.5);
}

TEST(Stopping, FortyRunsFiveCollisions)
{
  std::vector<double> d(40, 0.3);
  auto c = std::make_unique<bool[]>(40);
  for (int i = 0; i < 5; ++i) {
    d[i] = 0.0;
    c[i] = true;
  }
  EXPECT_DOUBLE_EQ(stopping_stats(d, std::span<const bool>(c.get(), 40)).success_rate, 0.875);
}

TEST(Stopping, SingletonIsDegenerate)
{
  const std::vector<double> d{0.25};
  const bool c[] = {false};
  const auto s = stopping_stats(d, c);
  EXPECT_EQ(s.median, 0.25);
  EXPECT_EQ(s.ci_low, 0.25);
  EXPECT_EQ(s.ci_high, 0.25);
  EXPECT_EQ(s.success_rate, 1.0);
  EXPECT_THROW(stopping_stats(std::span<const double>{}, std::span<const bool>{}), ValidationError);
}

// Exhaustive order-statistic oracle: exact binomial pmf by recurrence, then
// the largest lower rank l with P(B <= l - 1) <= alpha / 2.
std::pair<std::size_t, std::size_t> ci_oracle(std::size_t n, double confidence)
{
  std::vector<long double> pmf(n + 1);
  pmf[0] = std::pow(0.5L, static_cast<long double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    pmf[k + 1] = pmf[k] * static_cast<long double>(n - k) / static_cast<long double>(k + 1);
  }
  const long double a2 = 0.5L * (1.0L - confidence);
  std::size_t best = 0;
  for (std::size_t l = 1; l <= (n + 1) / 2; ++l) {
    long double tail = 0.0L;
    for (std::size_t k = 0; k + 1 <= l; ++k) {
      tail += pmf[k];
    }
    if (tail <= a2) {
      best = l;
    }
  }
  if (best == 0) {
    return {1, n};
  }
  return {best, n - best + 1};
}

TEST(Stopping, ConfidenceIntervalMatchesOrderStatisticOracle)
{
  std::mt19937_64 rng(101);
  std::normal_distribution<double> dist(0.33, 0.04);
  std::vector<double> d(101);
  for (auto & x : d) {
    x = dist(rng);
  }
  const auto c = std::make_unique<bool[]>(101);
  const auto s = stopping_stats(d, std::span<const bool>(c.get(), 101));
  const auto [lo, hi] = ci_oracle(101, 0.95);
  auto sorted = d;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(s.ci_low_rank, lo);
  EXPECT_EQ(s.ci_high_rank, hi);
  EXPECT_EQ(s.ci_low, sorted[lo - 1]);
  EXPECT_EQ(s.ci_high, sorted[hi - 1]);
  EXPECT_EQ(s.median, sorted[50]);
  for (std::size_t n = 1; n <= 200; ++n) {
    ASSERT_EQ(median_ci_ranks(n), ci_oracle(n, 0.95)) << n;
  }
}

TEST(Stopping, NearestRank)
{
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(nearest_rank(v, 0.8), 8.0);
  EXPECT_EQ(nearest_rank({4.2}, 0.3), 4.2);
  EXPECT_THROW(nearest_rank(v, 0.0), ValidationError);
}

// ---- timing

bus::StageLog constant_log(std::size_t frames, const std::vector<std::int64_t> & hops_ns)
{
  bus::StageLog log;
  for (std::size_t f = 1; f <= frames; ++f) {
    std::int64_t t = static_cast<std::int64_t>(f) * 1'000'000'000;
    log.record_hop(f, "camera", bus::Stage::kCapture, Timestamp{t});
    for (std::size_t j = 0; j < hops_ns.size(); ++j) {
      t += hops_ns[j];
      log.record_hop(f, "x", bus::kAllStages[j + 1], Timestamp{t});
    }
  }
  return log;
}

TEST(Timing, ConstantHopsGiveExactMedians)
{
  const std::vector<std::int64_t> hops{15'000'000, 300'000'000, 0, 5'000'000};
  const std::vector<bus::StageLog> logs{constant_log(7, hops), constant_log(3, hops)};
  const auto t = timing_report(std::span<const bus::StageLog>(logs));
  ASSERT_EQ(t.hops.size(), 4u);
  const double expect[] = {0.015, 0.3, 0.0, 0.005};
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(t.hops[j].median, expect[j]);
    EXPECT_EQ(t.hops[j].min, expect[j]);
    EXPECT_EQ(t.hops[j].max, expect[j]);
    EXPECT_EQ(t.hops[j].samples.size(), 10u);
  }
  EXPECT_EQ(t.end_to_end.median, 0.32);
  EXPECT_EQ(t.dominant, "ingest->detect_done");
}

TEST(Timing, EmpiricalExecTimesReproduced)
{
  sim::ScenarioConfig c;
  c.exec = sim::ExecTimeConfig::empirical({1.328, 1.202});
  c.speed_mps = 0.05;
  c.threshold = 1e9;
  c.max_duration_s = 10.0;
  const auto log = sim::run_scenario(c);
  ASSERT_GE(log.scores.size(), 4u);
  // Hand-built stage log: every scored frame gets all five stages.
  bus::StageLog stages;
  for (const auto & f : log.scores) {
    stages.record_hop(f.seq, "camera", bus::Stage::kCapture, f.capture);
    stages.record_hop(f.seq, "camera", bus::Stage::kIngest, f.ingest);
    stages.record_hop(f.seq, "ood", bus::Stage::kDetectDone, f.complete);
    stages.record_hop(f.seq, "estop", bus::Stage::kEstopSent, f.complete);
    stages.record_hop(f.seq, "motor", bus::Stage::kMotorZeroed, f.complete);
  }
  const std::vector<bus::StageLog> logs{stages};
  const auto t = timing_report(std::span<const bus::StageLog>(logs));
  const auto & det = t.hops[1].samples;
  ASSERT_EQ(det.size(), log.scores.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    EXPECT_EQ(det[i], c.exec.samples[i % 2]);
  }
  // The run log itself carries the same detector samples.
  std::vector<double> direct;
  for (const auto seq : log.stages.sequences()) {
    const auto tt = log.stages.times(seq);
    if (tt[1] && tt[2]) {
      direct.push_back(to_seconds(*tt[2] - *tt[1]));
    }
  }
  EXPECT_EQ(direct, det);
}

TEST(Timing, MissingStageOrOrderingIsAnError)
{
  bus::StageLog gap;
  gap.record_hop(1, "c", bus::Stage::kCapture, Timestamp{0});
  gap.record_hop(1, "c", bus::Stage::kIngest, Timestamp{5});
  const std::vector<bus::StageLog> logs{gap};
  EXPECT_THROW(timing_report(std::span<const bus::StageLog>(logs)), ValidationError);
  EXPECT_THROW(timing_report(std::span<const bus::StageLog>{}), ValidationError);
}

TEST(Timing, SummaryOrdered)
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> s(37);
  for (auto & x : s) {
    x = u(rng);
  }
  const auto l = summarize_latency("h", s);
  EXPECT_LE(l.min, l.median);
  EXPECT_LE(l.median, l.p95);
  EXPECT_LE(l.p95, l.max);
  EXPECT_EQ(l.samples, s);
}

// ---- sweep

const std::vector<sim::RunLog> & campaign_logs()
{
  static const std::vector<sim::RunLog> logs = [] {
    sim::ScenarioConfig c;
    c.speed_mps = 0.12;
    sim::CampaignOptions o;
    o.runs = 8;
    return sim::run_campaign(c, o).runs;
  }();
  return logs;
}

double max_score(const std::vector<sim::RunLog> & logs)
{
  double m = -1e300;
  for (const auto & l : logs) {
    for (const auto & f : l.scores) {
      m = std::max(m, f.score);
    }
  }
  return m;
}

TEST(Sweep, ZeroThresholdTriggersFirstFrame)
{
  const auto & logs = campaign_logs();
  const auto s = threshold_sweep(logs, {0.0, 1.0, 1.1, 1.2, max_score(logs)});
  for (std::size_t r = 0; r < logs.size(); ++r) {
    EXPECT_EQ(project_run(logs[r], 0.0).trigger_seq, logs[r].scores.front().seq);
    for (std::size_t t = 0; t < s.thresholds.size(); ++t) {
      EXPECT_GE(s.distances[0][r], s.distances[t][r]);
    }
    EXPECT_GT(s.distances[0][r], 0.0);
  }
}

TEST(Sweep, ThresholdAboveEveryScoreCollides)
{
  const auto & logs = campaign_logs();
  const auto s = threshold_sweep(logs, {max_score(logs)});
  EXPECT_EQ(s.collisions[0], logs.size());
  for (const double d : s.distances[0]) {
    EXPECT_EQ(d, 0.0);
  }
}

TEST(Sweep, ActualThresholdReproducesActualStop)
{
  for (const auto & log : campaign_logs()) {
    const auto p = project_run(log, log.threshold);
    ASSERT_TRUE(log.summary.trigger_seq);
    EXPECT_EQ(p.trigger_seq, log.summary.trigger_seq);
    const double tol = log.summary.velocity_estimate_mps * to_seconds(log.config.camera_period());
    EXPECT_NEAR(p.distance_m, log.summary.stopping_distance_m, tol);
  }
}

TEST(Sweep, MonotoneInThreshold)
{
  const auto & logs = campaign_logs();
  std::vector<double> taus;
  for (int i = 0; i <= 60; ++i) {
    taus.push_back(0.9 + i * 0.02);
  }
  std::shuffle(taus.begin(), taus.end(), std::mt19937_64(3));
  const auto s = threshold_sweep(logs, taus);
  EXPECT_TRUE(std::is_sorted(s.thresholds.begin(), s.thresholds.end()));
  for (std::size_t t = 1; t < s.thresholds.size(); ++t) {
    EXPECT_GE(s.collisions[t], s.collisions[t - 1]);
    for (std::size_t r = 0; r < logs.size(); ++r) {
      EXPECT_LE(s.distances[t][r], s.distances[t - 1][r]);
    }
  }
}

TEST(Sweep, MonotoneGateRaisesInvariantViolation)
{
  SweepResult bad;
  bad.thresholds = {0.0, 1.0};
  bad.runs = 1;
  bad.distances = {{0.1}, {0.2}};
  bad.out_of_risk = {0, 0};
  bad.collisions = {0, 0};
  EXPECT_THROW(check_sweep_monotone(bad), InvariantViolation);
}

TEST(Sweep, GridCardinality)
{
  std::vector<sim::RunLog> logs;
  for (int i = 0; i < 40; ++i) {
    logs.push_back(campaign_logs()[i % 8]);
  }
  const auto s = threshold_sweep(logs, {0.0, 1.0, 1.1, 1.2, 2.0});
  std::ostringstream out;
  write_sweep_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "threshold,run,projected_distance_m");
  std::size_t cells = 0;
  while (std::getline(in, line)) {
    ++cells;
  }
  EXPECT_EQ(cells, 200u);
  for (const auto & row : s.distances) {
    EXPECT_EQ(row.size(), 40u);
  }
}

TEST(Sweep, RejectsBadInput)
{
  EXPECT_THROW(threshold_sweep(campaign_logs(), {}), ValidationError);
  EXPECT_THROW(threshold_sweep(campaign_logs(), {NAN}), ValidationError);
  EXPECT_THROW(threshold_sweep(std::span<const sim::RunLog>{}, {1.0}), ValidationError);
}

TEST(Report, SvgAndJsonEmit)
{
  const auto & logs = campaign_logs();
  const auto svg = score_distance_svg(logs);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  const auto s = threshold_sweep(logs, {0.0, 1.2});
  EXPECT_NE(sweep_box_svg(s).find("</svg>"), std::string::npos);
  const auto j = to_json(s);
  EXPECT_EQ(j["runs"], 8);
}

}  // namespace
}  // namespace oodsim::analysis
