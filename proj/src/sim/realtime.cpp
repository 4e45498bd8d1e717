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

#include "oodsim/sim/realtime.hpp"

#include <condition_variable>
#include <mutex>
#include <stop_token>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oodsim/bus/bus.hpp"
#include "oodsim/bus/clock.hpp"
#include "oodsim/bus/stage_log.hpp"
#include "oodsim/control/motor.hpp"
#include "oodsim/core/error.hpp"
#include "oodsim/sim/engine.hpp"
#include "oodsim/sim/nodes.hpp"
#include "oodsim/sim/plant.hpp"

namespace oodsim::sim
{
namespace
{

using bus::Stage;
using namespace std::chrono_literals;

constexpr Duration kPoll = std::chrono::milliseconds(2);

/// Sleeps until the wall clock reads t or stop is requested; false on stop.
bool sleep_until(const bus::WallClock & clock, std::stop_token stop, Timestamp t)
{
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  return !cv.wait_until(lock, stop, clock.origin() + t, [] { return false; }) && !stop.stop_requested();
}

/// The physical vehicle, shared by the motor node and the supervisor.
class World
{
public:
  World(const control::EStopLatch & latch, double coast_m) : plant_(latch, coast_m) {}

  double position(Timestamp t)
  {
    std::lock_guard lock(mutex_);
    plant_.advance_to(std::max(t, plant_.now()));
    return plant_.state().x;
  }

  void command(const control::WheelCommand & cmd, Timestamp t)
  {
    std::lock_guard lock(mutex_);
    plant_.command(cmd, std::max(t, plant_.now()));
    sample();
  }

  /// Advances after the latch has been engaged so the coast is armed.
  void latch_applied(Timestamp t)
  {
    std::lock_guard lock(mutex_);
    plant_.advance_to(std::max(t, plant_.now()));
    sample();
  }

  struct Snapshot
  {
    double x;
    bool braking;
    bool stopped;
  };

  Snapshot observe(Timestamp t)
  {
    std::lock_guard lock(mutex_);
    plant_.advance_to(std::max(t, plant_.now()));
    const auto & s = plant_.state();
    return {s.x, s.braking, s.stopped};
  }

  std::vector<MotionSample> close(Timestamp t)
  {
    std::lock_guard lock(mutex_);
    plant_.advance_to(std::max(t, plant_.now()));
    sample();
    return motion_;
  }

private:
  void sample()
  {
    const auto & s = plant_.state();
    motion_.push_back({plant_.now(), s.x, s.v});
  }

  std::mutex mutex_;
  Plant plant_;
  std::vector<MotionSample> motion_;
};

}  // namespace

RunLog run_realtime(const ScenarioConfig & config, std::shared_ptr<const ood::Scorer> scorer)
{
  config.validate();
  if (!scorer) {
    throw ValidationError("run_realtime needs a scorer");
  }
  bus::WallClock clock;
  bus::Bus bus(clock);
  const PipelineTopics topics = create_pipeline_topics(bus);
  auto det_sub = topics.camera->subscribe();
  auto lane_sub = topics.camera->subscribe();
  auto estop_sub = topics.estop->subscribe();
  auto steer_sub = topics.steering->subscribe();

  control::EStopLatch latch;
  control::MotorController motor(motor_params(config), latch);
  World world(latch, config.coast_m);
  CameraNode camera(config);
  DetectorNode detector(scorer, config.exec, exec_seed(config));
  LaneNode lane;

  RunLog log;
  log.config = config;
  log.scorer = std::string(scorer->name());
  log.threshold = scorer->threshold();
  if (const auto * vae = dynamic_cast<const ood::VaeScorer *>(scorer.get())) {
    log.detector_subset = vae->config().subset;
  }
  bus::StageLog & stages = log.stages;
  std::size_t frames_captured = 0;
  std::optional<std::uint64_t> trigger_seq;
  std::optional<Timestamp> estop_ts;
  std::mutex error_mutex;
  std::exception_ptr error;

  auto guarded = [&](auto body) {
    return [&, body](std::stop_token own) {
      try {
        body(own);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    };
  };

  world.command(motor.initial(clock.now()), clock.now());
  const Duration period = config.camera_period();
  const Duration lane_period = config.lane_period();
  const Duration ingest_lat = from_seconds(config.ingest_latency_s);
  const Duration estop_lat = from_seconds(config.estop_latency_s);

  std::vector<std::jthread> threads;
  threads.emplace_back(guarded([&](std::stop_token stop) {
    for (std::uint64_t k = 0; !stop.stop_requested(); ++k) {
      if (!sleep_until(clock, stop, period * static_cast<std::int64_t>(k))) {
        return;
      }
      const Timestamp t = clock.now();
      const double x = world.position(t);
      if (config.obstacle && x >= config.d_obs_m) {
        return;
      }
      Frame frame = camera.capture(k + 1, t, x);
      stages.record_hop(k + 1, kCameraTopic, Stage::kCapture, t);
      ++frames_captured;
      if (!sleep_until(clock, stop, t + ingest_lat)) {
        return;
      }
      topics.camera->publish(std::move(frame), t, clock.now());
    }
  }));
  threads.emplace_back(guarded([&](std::stop_token stop) {
    bool sent = false;
    while (!stop.stop_requested()) {
      auto env = det_sub->wait_latest(stop, kPoll);
      if (!env) {
        continue;
      }
      const Timestamp ingest = clock.now();
      log.takes.push_back({ingest, env->seq, topics.camera->last_seq()});
      stages.record_hop(*env, Stage::kIngest, ingest);
      auto work = detector.process(env->payload, ingest);
      if (!sleep_until(clock, stop, ingest + work.exec)) {
        return;
      }
      const Timestamp done = clock.now();
      stages.record_hop(env->seq, kOodTopic, Stage::kDetectDone, done);
      log.scores.push_back(
        {env->seq, env->capture_ts, ingest, done, env->payload.truth.vehicle_x_m, work.result.score,
         work.result.flagged, work.result.kl});
      work.result.complete = done;
      const bool flagged = work.result.flagged;
      const double score = work.result.score;
      topics.ood->publish(std::move(work.result), env->capture_ts, done);
      if (flagged && !sent) {
        sent = true;
        trigger_seq = env->seq;
        stages.record_hop(env->seq, kEstopTopic, Stage::kEstopSent, done);
        topics.estop->publish(EStopMsg{env->seq, score}, env->capture_ts, done);
      }
    }
  }));
  threads.emplace_back(guarded([&](std::stop_token stop) {
    for (std::uint64_t j = 0; !stop.stop_requested(); ++j) {
      if (!sleep_until(clock, stop, lane_period * static_cast<std::int64_t>(j))) {
        return;
      }
      if (auto env = lane_sub->take_latest()) {
        SteeringMsg msg = lane.process(env->payload);
        log.steering.push_back({clock.now(), msg.frame_seq, msg.angle_deg, msg.confidence});
        topics.steering->publish(msg, env->capture_ts, clock.now());
      }
    }
  }));
  threads.emplace_back(guarded([&](std::stop_token stop) {
    while (!stop.stop_requested()) {
      if (auto env = estop_sub->wait_next(stop, kPoll)) {
        if (!sleep_until(clock, stop, env->publish_ts + estop_lat)) {
          return;
        }
        const Timestamp t = clock.now();
        world.position(t);
        motor.on_estop(t);
        world.latch_applied(t);
        stages.record_hop(env->payload.frame_seq, kMotorTopic, Stage::kMotorZeroed, t);
        estop_ts = t;
      }
      while (auto env = steer_sub->take_next()) {
        const Timestamp t = clock.now();
        world.command(motor.on_steering(env->payload.angle_deg, t), t);
      }
    }
  }));

  // Supervisor.
  EndReason reason = EndReason::kTimeout;
  const Timestamp deadline = from_seconds(config.max_duration_s);
  Timestamp end{0};
  double x_end = 0.0;
  while (true) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    {
      std::lock_guard lock(error_mutex);
      if (error) {
        break;
      }
    }
    end = clock.now();
    const auto snap = world.observe(end);
    x_end = snap.x;
    if (config.obstacle && snap.x >= config.d_obs_m) {
      reason = EndReason::kCollision;
      break;
    }
    if (snap.braking && snap.stopped) {
      reason = EndReason::kStopped;
      break;
    }
    if (end >= deadline) {
      reason = EndReason::kTimeout;
      break;
    }
  }
  for (auto & t : threads) {
    t.request_stop();
  }
  threads.clear();
  if (error) {
    std::rethrow_exception(error);
  }
  log.motion = world.close(end);
  log.summary.frames_captured = frames_captured;
  log.summary.trigger_seq = trigger_seq;
  log.summary.estop_ts = estop_ts;
  finalize_summary(log, reason, end, x_end);
  spdlog::debug("real-time run ended ({}) after {:.3f} s", to_string(reason), to_seconds(end));
  return log;
}

}  // namespace oodsim::sim
