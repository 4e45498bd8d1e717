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

#include "oodsim/core/error.hpp"
#include "oodsim/sim/calibration.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/engine.hpp"
#include "oodsim/sim/exec_time.hpp"
#include "oodsim/sim/oracle.hpp"
#include "oodsim/sim/plant.hpp"
#include "oodsim/sim/realtime.hpp"
#include "oodsim/sim/render.hpp"
#include "test_util.hpp"

namespace oodsim::sim
{
namespace
{

// ---- config

TEST(Config, JsonRoundTrip)
{
  ScenarioConfig c;
  c.exec = ExecTimeConfig::empirical({1.328, 1.202});
  c.obstacle = ObstacleKind::kBox;
  c.threshold = 1.25;
  c.seed = 99;
  const auto j = to_json(c);
  EXPECT_EQ(to_json(config_from_json(j)), j);
  c.obstacle.reset();
  EXPECT_EQ(to_json(config_from_json(to_json(c))), to_json(c));
}

TEST(Config, FileRoundTrip)
{
  const auto dir = test::scratch_dir("config");
  ScenarioConfig c;
  c.speed_mps = 0.15;
  save_config(dir / "c.json", c);
  EXPECT_EQ(to_json(load_config(dir / "c.json")), to_json(c));
  EXPECT_THROW(load_config(dir / "missing.json"), ValidationError);
}

TEST(Config, UnknownKeysRejected)
{
  auto j = to_json(ScenarioConfig{});
  j["scene"]["d_obstacle"] = 0.7;
  EXPECT_THROW(config_from_json(j), ValidationError);
}

TEST(Config, InvariantsEnforced)
{
  ScenarioConfig c;
  c.risk_m = 0.8;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ScenarioConfig{};
  c.camera_hz = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ScenarioConfig{};
  c.scorer = ScorerKind::kVae;
  EXPECT_THROW(c.validate(), ValidationError);
  c = ScenarioConfig{};
  c.exec = ExecTimeConfig::empirical({0.5, -1.0});
  EXPECT_THROW(c.validate(), ValidationError);
  EXPECT_NO_THROW(ScenarioConfig{}.validate());
}

// ---- render

TEST(Render, EmptySceneHasNoObstaclePixels)
{
  Scene s;
  s.obstacle.reset();
  const auto mask = obstacle_mask(s);
  EXPECT_TRUE(std::all_of(mask.data().begin(), mask.data().end(), [](auto v) { return v == 0; }));
  EXPECT_FALSE(scene_truth(s).obstacle_present);
}

TEST(Render, Deterministic)
{
  ScenarioConfig c;
  const auto a = render_frame(c, 0.3, 5);
  const auto b = render_frame(c, 0.3, 5);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.width(), 640);
  EXPECT_EQ(a.height(), 480);
  EXPECT_NE(render_frame(c, 0.3, 6), a);
}

TEST(Render, ParallelMatchesReference)
{
  for (const auto kind : {ObstacleKind::kDuck, ObstacleKind::kCone, ObstacleKind::kBox, ObstacleKind::kBot}) {
    Scene s;
    s.obstacle = kind;
    s.distance_m = 0.3;
    s.illumination = 1.07;
    s.noise_seed = 11;
    s.frame_seq = 3;
    EXPECT_EQ(render(s), reference::render(s));
  }
}

std::int64_t mask_count(const Scene & s)
{
  const auto m = obstacle_mask(s);
  return std::count_if(m.data().begin(), m.data().end(), [](auto v) { return v != 0; });
}

TEST(Render, ApparentSizeGrowsAsObstacleNears)
{
  for (const auto kind : {ObstacleKind::kDuck, ObstacleKind::kCone, ObstacleKind::kBox, ObstacleKind::kBot}) {
    Scene near, far;
    near.obstacle = far.obstacle = kind;
    near.distance_m = 0.15;
    far.distance_m = 0.75;
    EXPECT_GT(mask_count(near), mask_count(far)) << to_string(kind);
    // Projective oracle: box height equals focal * h / d to within rounding.
    const auto box = obstacle_box(kind, 0.75);
    const double h = kCamera.focal_px * obstacle_spec(kind).height_m / 0.75;
    EXPECT_NEAR(box.y1 - box.y0, h, 1.5);
    const double w = kCamera.focal_px * obstacle_spec(kind).width_m / 0.75;
    EXPECT_NEAR(box.x1 - box.x0, w, 1.5);
  }
}

TEST(Render, MaskMatchesBox)
{
  Scene s;
  s.obstacle = ObstacleKind::kCone;
  s.distance_m = 0.4;
  const auto box = obstacle_box(*s.obstacle, s.distance_m);
  EXPECT_EQ(mask_count(s), box.area());
}

// ---- oracle score

TEST(Oracle, EmptySceneScoresBase)
{
  ScenarioConfig c;
  c.obstacle.reset();
  c.oracle.s_base = 1.3;
  EXPECT_DOUBLE_EQ(oracle_score(c, 0.2), 1.3);
}

TEST(Oracle, LinearForm)
{
  SceneTruth t;
  t.obstacle_present = true;
  t.obstacle_view_fraction = 0.1;
  t.obstacle_gain = 10.0;
  EXPECT_DOUBLE_EQ(oracle_score(OracleParams{1.0, 0.0}, t), 2.0);
}

TEST(Oracle, NonDecreasingOverApproach)
{
  for (const auto kind : {ObstacleKind::kDuck, ObstacleKind::kCone, ObstacleKind::kBox, ObstacleKind::kBot}) {
    ScenarioConfig c;
    c.obstacle = kind;
    double prev = -1.0;
    for (int i = 0; i <= 600; ++i) {
      const double s = oracle_score(c, i * 0.001);
      ASSERT_GE(s, prev) << to_string(kind) << " x=" << i * 0.001;
      prev = s;
    }
    EXPECT_GT(prev, oracle_score(c, 0.0));
  }
}

TEST(Oracle, ScorerUsesFrameTruth)
{
  ScenarioConfig c;
  const Frame f = capture_frame(c, 0.5, 1, Timestamp{0});
  OracleScorer scorer(c.oracle, 1.0);
  EXPECT_DOUBLE_EQ(scorer.evaluate(f).score, oracle_score(c, 0.5));
  EXPECT_THROW(OracleScorer(c.oracle, NAN), ValidationError);
}

// ---- kinematics

TEST(Kinematics, ConstantCommand)
{
  const auto s = step_kinematics({}, {0.2, 0.2}, 0.1, 0.0);
  EXPECT_NEAR(s.x, 0.02, 1e-15);
  EXPECT_EQ(step_kinematics({}, {0.0, 0.0}, 0.1, 0.0).x, 0.0);
  EXPECT_THROW(step_kinematics({}, {0.2, 0.2}, 0.0, 0.0), ValidationError);
}

TEST(Kinematics, PiecewiseIntegrationOracle)
{
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> speed(0.0, 0.5), dt(0.001, 0.3);
  VehicleState s;
  double oracle = 0.0;
  for (int i = 0; i < 500; ++i) {
    const control::WheelCommand cmd{speed(rng), speed(rng)};
    const double d = dt(rng);
    s = step_kinematics(s, cmd, d, 0.0);
    oracle += 0.5 * (cmd.left + cmd.right) * d;
    ASSERT_DOUBLE_EQ(s.x, oracle);
  }
}

TEST(Kinematics, CoastBoundsTravelAfterLatch)
{
  control::EStopLatch latch;
  Plant plant(latch, 0.03);
  plant.command({0.2, 0.2}, Timestamp{0});
  plant.advance_to(from_seconds(1.0));
  const double x_latch = plant.state().x;
  latch.engage(from_seconds(1.0));
  plant.command({0.5, 0.5}, from_seconds(1.0));
  const auto halt = plant.halt_time();
  ASSERT_TRUE(halt);
  EXPECT_NEAR(to_seconds(*halt - from_seconds(1.0)), 0.15, 1e-9);
  plant.advance_to(from_seconds(5.0));
  EXPECT_NEAR(plant.state().x - x_latch, 0.03, 1e-12);
  EXPECT_TRUE(plant.state().stopped);
  EXPECT_THROW(plant.advance_to(from_seconds(4.0)), OrderingError);
}

TEST(Kinematics, TimeToReach)
{
  control::EStopLatch latch;
  Plant plant(latch, 0.0);
  plant.command({0.2, 0.2}, Timestamp{0});
  const auto t = plant.time_to_reach(0.7);
  ASSERT_TRUE(t);
  EXPECT_EQ(*t, from_seconds(3.5));
  EXPECT_NEAR(plant.position_at(from_seconds(1.0)), 0.2, 1e-12);
}

// ---- exec time

TEST(ExecTime, Constant)
{
  ExecTimeModel m(ExecTimeConfig::constant(0.3), 1);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(m.sample_seconds(), 0.3);
  }
  EXPECT_EQ(ExecTimeModel(ExecTimeConfig::constant(0.3), 1).sample(), Duration{300'000'000});
}

TEST(ExecTime, EmpiricalCycles)
{
  ExecTimeModel m(ExecTimeConfig::empirical({1.328, 1.202}), 1);
  const double expect[] = {1.328, 1.202, 1.328, 1.202, 1.328};
  for (const double e : expect) {
    EXPECT_EQ(m.sample_seconds(), e);
  }
}

TEST(ExecTime, LogNormalMedian)
{
  ExecTimeModel m(ExecTimeConfig::lognormal(0.542, 0.35), 2024);
  std::vector<double> v(100000);
  for (auto & x : v) {
    x = m.sample_seconds();
    ASSERT_GT(x, 0.0);
  }
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  EXPECT_NEAR(v[v.size() / 2], 0.542, 0.02 * 0.542);
}

TEST(ExecTime, SeededReproducible)
{
  ExecTimeModel a(ExecTimeConfig::lognormal(0.542, 0.35), 5), b(ExecTimeConfig::lognormal(0.542, 0.35), 5);
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.sample(), b.sample());
  }
}

// ---- calibration

TEST(Calibration, NearestRankOverEmptyLaneFrames)
{
  ScenarioConfig c;
  c.calibration_frames = 100;
  const auto cal = calibrate_oracle(c);
  ASSERT_EQ(cal.scores.size(), 100u);
  auto sorted = cal.scores;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(cal.detector.threshold, sorted[79]);
}

TEST(Calibration, HalfOfTwelveFortyLeavesOneTwentyFourAbove)
{
  ScenarioConfig c;
  const auto cal = calibrate_oracle(c);
  ASSERT_EQ(cal.scores.size(), 620u);
  EXPECT_EQ(std::count_if(cal.scores.begin(), cal.scores.end(), [&](double s) { return s > cal.detector.threshold; }), 124);
}

TEST(Calibration, SingleFrame)
{
  ScenarioConfig c;
  c.calibration_frames = 1;
  const auto cal = calibrate_oracle(c);
  EXPECT_EQ(cal.detector.threshold, cal.scores[0]);
}

TEST(Calibration, JsonRoundTrip)
{
  const auto cal = calibrate_oracle(ScenarioConfig{});
  EXPECT_EQ(to_json(calibration_from_json(to_json(cal))), to_json(cal));
}

// ---- scheduler

TEST(Scheduler, OrdersByTimePriorityInsertion)
{
  bus::VirtualClock clock;
  Scheduler s(clock);
  std::vector<int> order;
  s.at(Timestamp{5}, [&] { order.push_back(3); });
  s.at(Timestamp{5}, [&] { order.push_back(4); });
  s.at(Timestamp{5}, [&] { order.push_back(2); }, Scheduler::kTerminal);
  s.at(Timestamp{1}, [&] { order.push_back(1); });
  s.run();
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_THROW(s.at(Timestamp{4}, [] {}), OrderingError);
}

// ---- engine

// Flags every frame captured at or beyond a position.
class PositionScorer final : public ood::Scorer
{
public:
  explicit PositionScorer(double x) : x_(x) {}
  ood::ScoreOutput evaluate(const Frame & f) const override
  {
    return {{}, f.truth.vehicle_x_m >= x_ - 1e-9 ? 2.0 : 0.0};
  }
  double threshold() const override { return 1.0; }
  std::string_view name() const override { return "position"; }

private:
  double x_;
};

ScenarioConfig trace_config()
{
  ScenarioConfig c;
  c.speed_mps = 0.2;
  c.exec = ExecTimeConfig::constant(0.3);
  c.coast_m = 0.0;
  c.obstacle = ObstacleKind::kDuck;
  return c;
}

struct TraceOracle
{
  std::int64_t motor_zeroed_ns = -1;
  std::uint64_t trigger_seq = 0;
  std::vector<std::uint64_t> taken;
};

// Independent discrete-event trace of the busy detector: integer ns
// arithmetic, frames published at k*P + L, the detector takes the newest
// published frame whenever it is free and keeps working after the flag.
TraceOracle trace_oracle(const ScenarioConfig & c, double flag_x, std::vector<double> exec)
{
  const std::int64_t P = std::llround(1e9 / c.camera_hz);
  const std::int64_t L = std::llround(c.ingest_latency_s * 1e9);
  const std::int64_t S = std::llround(c.estop_latency_s * 1e9);
  TraceOracle o;
  std::int64_t t = L;
  std::uint64_t last = 0;
  std::size_t next_exec = 0;
  for (int guard = 0; guard < 10000; ++guard) {
    const std::uint64_t k = static_cast<std::uint64_t>((t - L) / P);
    if (k + 1 <= last) {
      if (o.trigger_seq != 0) {
        return o;
      }
      t = static_cast<std::int64_t>(last) * P + L;
      continue;
    }
    last = k + 1;
    o.taken.push_back(last);
    if (o.trigger_seq != 0) {
      return o;
    }
    const double capture_x = c.speed_mps * (static_cast<double>(k) * P * 1e-9);
    const std::int64_t done = t + std::llround(exec[next_exec++ % exec.size()] * 1e9);
    if (capture_x >= flag_x - 1e-9) {
      o.motor_zeroed_ns = done + S;
      o.trigger_seq = last;
    }
    t = done;
  }
  return o;
}

TEST(Engine, IdleDetectorStopMatchesClosedForm)
{
  // A 2 Hz camera leaves the detector idle, so the frame captured at
  // x = 0.10 is ingested after exactly one hop.
  auto c = trace_config();
  c.camera_hz = 2.0;
  const auto log = run_scenario(c, std::make_shared<PositionScorer>(0.10));
  EXPECT_EQ(log.summary.end_reason, EndReason::kStopped);
  ASSERT_TRUE(log.summary.trigger_seq);
  EXPECT_EQ(*log.summary.trigger_seq, 2u);
  EXPECT_NEAR(log.summary.x_final, 0.10 + 0.2 * (0.3 + 0.015 + 0.005), 1e-9);
}

TEST(Engine, BusyDetectorMatchesTraceOracle)
{
  for (const double flag_x : {0.05, 0.10, 0.23, 0.41}) {
    const auto c = trace_config();
    const auto o = trace_oracle(c, flag_x, {0.3});
    ASSERT_GE(o.motor_zeroed_ns, 0);
    const auto log = run_scenario(c, std::make_shared<PositionScorer>(flag_x));
    ASSERT_TRUE(log.summary.trigger_seq);
    EXPECT_EQ(*log.summary.trigger_seq, o.trigger_seq) << flag_x;
    ASSERT_TRUE(log.summary.estop_ts);
    EXPECT_EQ(log.summary.estop_ts->count(), o.motor_zeroed_ns) << flag_x;
    EXPECT_NEAR(log.summary.x_final, 0.2 * o.motor_zeroed_ns * 1e-9, 1e-9) << flag_x;
    std::vector<std::uint64_t> taken;
    for (const auto & t : log.takes) {
      taken.push_back(t.taken_seq);
      EXPECT_EQ(t.taken_seq, t.newest_seq);
    }
    EXPECT_EQ(taken, o.taken);
  }
}

TEST(Engine, EmpiricalExecTimesMatchTraceOracle)
{
  auto c = trace_config();
  c.exec = ExecTimeConfig::empirical({1.328, 1.202});
  for (const double flag_x : {0.10, 0.25, 0.35, 0.40}) {
    const auto o = trace_oracle(c, flag_x, c.exec.samples);
    const auto log = run_scenario(c, std::make_shared<PositionScorer>(flag_x));
    const std::int64_t contact_ns = std::llround(c.d_obs_m / c.speed_mps * 1e9);
    const std::int64_t done_ns = o.motor_zeroed_ns - std::llround(c.estop_latency_s * 1e9);
    if (done_ns >= contact_ns) {
      // The verdict arrives after contact: no e-stop is ever sent.
      EXPECT_FALSE(log.summary.trigger_seq) << flag_x;
      EXPECT_TRUE(log.summary.collision) << flag_x;
      continue;
    }
    ASSERT_TRUE(log.summary.trigger_seq) << flag_x;
    EXPECT_EQ(*log.summary.trigger_seq, o.trigger_seq) << flag_x;
    ASSERT_TRUE(log.summary.estop_ts);
    EXPECT_EQ(log.summary.estop_ts->count(), o.motor_zeroed_ns) << flag_x;
    const double x_stop = 0.2 * o.motor_zeroed_ns * 1e-9;
    EXPECT_EQ(log.summary.collision, x_stop >= c.d_obs_m) << flag_x;
    if (x_stop < c.d_obs_m) {
      EXPECT_NEAR(log.summary.stopping_distance_m, c.d_obs_m - x_stop, 1e-9) << flag_x;
    }
  }
}

TEST(Engine, LongDetectionLatencyCollides)
{
  // With 1.3 s detections at 0.2 m/s, a flag raised within one detection
  // latency of the obstacle cannot stop the vehicle in time.
  auto c = trace_config();
  c.exec = ExecTimeConfig::empirical({1.328, 1.202});
  const auto log = run_scenario(c, std::make_shared<PositionScorer>(0.45));
  EXPECT_TRUE(log.summary.collision);
  EXPECT_EQ(log.summary.stopping_distance_m, 0.0);
  EXPECT_EQ(log.summary.end_reason, EndReason::kCollision);
  EXPECT_EQ(log.summary.x_final, c.d_obs_m);
}

TEST(Engine, ThresholdBelowEveryScoreStopsOnFirstFrame)
{
  auto c = trace_config();
  c.threshold = -1.0;
  const auto log = run_scenario(c);
  ASSERT_TRUE(log.summary.trigger_seq);
  EXPECT_EQ(*log.summary.trigger_seq, 1u);
  EXPECT_EQ(log.scores.size(), 1u);
  const double t_stop = to_seconds(*log.summary.estop_ts);
  EXPECT_NEAR(log.summary.stopping_distance_m, c.d_obs_m - c.speed_mps * t_stop, 1e-9);
  EXPECT_NEAR(t_stop, 0.015 + 0.3 + 0.005, 1e-12);
}

TEST(Engine, ThresholdAboveEveryScoreCollides)
{
  auto c = trace_config();
  c.threshold = 1e9;
  const auto log = run_scenario(c);
  EXPECT_TRUE(log.summary.collision);
  EXPECT_EQ(log.summary.stopping_distance_m, 0.0);
  EXPECT_FALSE(log.summary.trigger_seq);
}

TEST(Engine, StopDominanceWithCoast)
{
  for (const double coast : {0.0, 0.01, 0.05}) {
    auto c = trace_config();
    c.coast_m = coast;
    const auto log = run_scenario(c, std::make_shared<PositionScorer>(0.1));
    ASSERT_TRUE(log.summary.estop_ts);
    double x_latch = 0.0;
    for (const auto & m : log.motion) {
      if (m.t <= *log.summary.estop_ts) {
        x_latch = m.x;
      }
    }
    EXPECT_NEAR(log.summary.x_final - x_latch, coast, 1e-9);
  }
}

TEST(Engine, EveryDetectorTakeIsTheNewestFrame)
{
  auto c = trace_config();
  c.exec = ExecTimeConfig::lognormal(0.542, 0.35);
  c.speed_mps = 0.12;
  const auto log = run_scenario(c);
  ASSERT_GE(log.takes.size(), 2u);
  for (const auto & t : log.takes) {
    EXPECT_EQ(t.taken_seq, t.newest_seq);
  }
  EXPECT_LT(log.scores.size(), log.summary.frames_captured);
}

TEST(Engine, DeterministicRunLog)
{
  ScenarioConfig c;
  c.speed_mps = 0.12;
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(a.stages, b.stages);
}

TEST(Engine, CampaignDeterministicAndIndexOrdered)
{
  ScenarioConfig c;
  c.speed_mps = 0.12;
  CampaignOptions o;
  o.runs = 8;
  const auto a = run_campaign(c, o);
  const auto b = run_campaign(c, o);
  ASSERT_EQ(a.runs.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(to_json(a.runs[i]).dump(), to_json(b.runs[i]).dump());
    EXPECT_EQ(a.runs[i].config.obstacle, o.obstacles[i % 4]);
    EXPECT_EQ(a.runs[i].config.seed, campaign_run_config(c, o, i).seed);
  }
  o.runs = 0;
  EXPECT_THROW(run_campaign(c, o), ValidationError);
}

TEST(Engine, EveryRunHasScoreAboveThreshold)
{
  ScenarioConfig c;
  c.speed_mps = 0.12;
  CampaignOptions o;
  o.runs = 8;
  for (const auto & run : run_campaign(c, o).runs) {
    EXPECT_TRUE(std::any_of(run.scores.begin(), run.scores.end(), [](const auto & s) { return s.flagged; }));
  }
}

TEST(Engine, RunLogFileRoundTrip)
{
  ScenarioConfig c;
  c.speed_mps = 0.12;
  const auto log = run_scenario(c);
  const auto dir = test::scratch_dir("runlog");
  write_run(dir, run_stem(0), log);
  const auto back = read_run(dir / (run_stem(0) + ".json"));
  EXPECT_EQ(to_json(back).dump(), to_json(log).dump());
  EXPECT_EQ(back.stages, log.stages);
}

TEST(Realtime, WallClockRunStops)
{
  auto c = trace_config();
  c.threshold = -1.0;
  c.exec = ExecTimeConfig::constant(0.05);
  c.speed_mps = 0.5;
  c.max_duration_s = 2.0;
  const auto log = run_realtime(c, std::make_shared<OracleScorer>(c.oracle, *c.threshold));
  ASSERT_TRUE(log.summary.trigger_seq);
  EXPECT_FALSE(log.summary.collision);
  EXPECT_GE(log.scores.size(), 1u);
  EXPECT_GT(log.summary.stopping_distance_m, 0.3);
}

}  // namespace
}  // namespace oodsim::sim
