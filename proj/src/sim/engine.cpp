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

#include "oodsim/sim/engine.hpp"

#include <exception>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "oodsim/analysis/analysis.hpp"
#include "oodsim/bus/bus.hpp"
#include "oodsim/bus/stage_log.hpp"
#include "oodsim/control/motor.hpp"
#include "oodsim/core/error.hpp"
#include "oodsim/sim/nodes.hpp"
#include "oodsim/sim/oracle.hpp"
#include "oodsim/sim/plant.hpp"

namespace oodsim::sim
{

bool Scheduler::Later::operator()(const Event & a, const Event & b) const
{
  if (a.t != b.t) {
    return a.t > b.t;
  }
  if (a.priority != b.priority) {
    return a.priority > b.priority;
  }
  return a.order > b.order;
}

void Scheduler::at(Timestamp t, std::function<void()> fn, int priority)
{
  if (t < clock_.now()) {
    throw OrderingError(fmt::format(
      "cannot schedule at {} ns, the clock is already at {} ns", t.count(), clock_.now().count()));
  }
  queue_.push({t, priority, next_order_++, std::move(fn)});
}

bool Scheduler::step()
{
  if (stopped_ || queue_.empty()) {
    return false;
  }
  Event ev = queue_.top();
  queue_.pop();
  clock_.advance_to(ev.t);
  ++executed_;
  ev.fn();
  return true;
}

void Scheduler::run()
{
  while (step()) {
  }
}

namespace
{

using bus::Stage;

class VirtualRun
{
public:
  VirtualRun(const ScenarioConfig & config, std::shared_ptr<const ood::Scorer> scorer)
  : cfg_(config),
    bus_(clock_),
    topics_(create_pipeline_topics(bus_)),
    det_sub_(topics_.camera->subscribe()),
    lane_sub_(topics_.camera->subscribe()),
    estop_sub_(topics_.estop->subscribe()),
    steer_sub_(topics_.steering->subscribe()),
    sched_(clock_),
    motor_(motor_params(config), latch_),
    plant_(latch_, config.coast_m),
    camera_(cfg_),
    detector_(scorer, config.exec, exec_seed(config)),
    period_(config.camera_period()),
    lane_period_(config.lane_period())
  {
    log_.config = config;
    log_.scorer = std::string(scorer->name());
    log_.threshold = scorer->threshold();
    if (const auto * vae = dynamic_cast<const ood::VaeScorer *>(scorer.get())) {
      log_.detector_subset = vae->config().subset;
    }
  }

  RunLog run()
  {
    sched_.at(Timestamp{0}, [this] { motor_init(); });
    sched_.at(Timestamp{0}, [this] { capture(0); });
    sched_.at(Timestamp{0}, [this] { lane_tick(0); });
    sched_.at(from_seconds(cfg_.max_duration_s), [this] { finish(EndReason::kTimeout); }, Scheduler::kTerminal);
    sched_.run();
    if (!finished_) {
      throw InvariantViolation("event queue drained before the run ended");
    }
    return std::move(log_);
  }

private:
  Timestamp now() const { return clock_.now(); }

  void sample_motion()
  {
    const auto & s = plant_.state();
    log_.motion.push_back({now(), s.x, s.v});
  }

  void motor_init()
  {
    plant_.command(motor_.initial(now()), now());
    sample_motion();
    reschedule_terminal();
  }

  void capture(std::uint64_t k)
  {
    plant_.advance_to(now());
    const double x = plant_.state().x;
    if (cfg_.obstacle && x >= cfg_.d_obs_m) {
      // Contact reached within the collision event's rounding.
      finish(EndReason::kCollision);
      return;
    }
    const std::uint64_t seq = k + 1;
    Frame frame = camera_.capture_deferred(seq, now(), x);
    log_.stages.record_hop(seq, kCameraTopic, Stage::kCapture, now());
    ++log_.summary.frames_captured;
    sched_.at(now() + from_seconds(cfg_.ingest_latency_s), [this, frame] { publish_frame(frame); });
    sched_.at(period_ * static_cast<std::int64_t>(k + 1), [this, k] { capture(k + 1); });
  }

  void publish_frame(const Frame & frame)
  {
    const auto seq = topics_.camera->publish(frame, frame.capture_ts, now());
    if (seq != frame.seq) {
      throw InvariantViolation(fmt::format("camera topic assigned seq {} to frame {}", seq, frame.seq));
    }
    if (!detector_busy_) {
      detector_take();
    }
  }

  void detector_take()
  {
    auto env = det_sub_->take_latest();
    if (!env) {
      detector_busy_ = false;
      return;
    }
    detector_busy_ = true;
    log_.takes.push_back({now(), env->seq, topics_.camera->last_seq()});
    log_.stages.record_hop(*env, Stage::kIngest, now());
    camera_.develop(env->payload);
    auto work = detector_.process(env->payload, now());
    const Timestamp capture_ts = env->capture_ts;
    const double capture_x = env->payload.truth.vehicle_x_m;
    sched_.at(work.result.complete, [this, work = std::move(work), capture_ts, capture_x]() mutable {
      detect_done(std::move(work.result), capture_ts, capture_x);
    });
  }

  void detect_done(ood::OODResult result, Timestamp capture_ts, double capture_x)
  {
    const std::uint64_t seq = result.seq;
    log_.stages.record_hop(seq, kOodTopic, Stage::kDetectDone, now());
    log_.scores.push_back({seq, capture_ts, result.ingest, result.complete, capture_x, result.score, result.flagged, result.kl});
    const bool flagged = result.flagged;
    const double score = result.score;
    topics_.ood->publish(std::move(result), capture_ts, now());
    if (flagged && !estop_sent_) {
      estop_sent_ = true;
      log_.summary.trigger_seq = seq;
      log_.stages.record_hop(seq, kEstopTopic, Stage::kEstopSent, now());
      topics_.estop->publish(EStopMsg{seq, score}, capture_ts, now());
      sched_.at(now() + from_seconds(cfg_.estop_latency_s), [this] { motor_estop(); });
    }
    detector_take();
  }

  void motor_estop()
  {
    auto env = estop_sub_->take_next();
    if (!env) {
      throw InvariantViolation("e-stop delivery found an empty queue");
    }
    plant_.advance_to(now());
    motor_.on_estop(now());
    plant_.advance_to(now());
    log_.stages.record_hop(env->payload.frame_seq, kMotorTopic, Stage::kMotorZeroed, now());
    log_.summary.estop_ts = now();
    sample_motion();
    reschedule_terminal();
  }

  void lane_tick(std::uint64_t j)
  {
    if (auto env = lane_sub_->take_latest()) {
      camera_.develop(env->payload);
      SteeringMsg msg = lane_.process(env->payload);
      log_.steering.push_back({now(), msg.frame_seq, msg.angle_deg, msg.confidence});
      topics_.steering->publish(msg, env->capture_ts, now());
      motor_steering();
    }
    sched_.at(lane_period_ * static_cast<std::int64_t>(j + 1), [this, j] { lane_tick(j + 1); });
  }

  void motor_steering()
  {
    while (auto env = steer_sub_->take_next()) {
      plant_.command(motor_.on_steering(env->payload.angle_deg, now()), now());
    }
    sample_motion();
    reschedule_terminal();
  }

  void reschedule_terminal()
  {
    const std::uint64_t version = ++version_;
    if (cfg_.obstacle) {
      if (const auto tc = plant_.time_to_reach(cfg_.d_obs_m)) {
        sched_.at(*tc, [this, version] { on_contact(version); }, Scheduler::kTerminal);
        return;
      }
    }
    if (plant_.state().braking) {
      if (const auto th = plant_.halt_time()) {
        sched_.at(*th, [this, version] { on_halt(version); }, Scheduler::kTerminal);
      }
    }
  }

  void on_contact(std::uint64_t version)
  {
    if (version != version_) {
      return;
    }
    finish(EndReason::kCollision);
  }

  void on_halt(std::uint64_t version)
  {
    if (version != version_) {
      return;
    }
    finish(EndReason::kStopped);
  }

  void finish(EndReason reason)
  {
    if (finished_) {
      return;
    }
    finished_ = true;
    sched_.stop();
    plant_.advance_to(now());
    if (reason == EndReason::kCollision) {
      plant_.clamp_position(cfg_.d_obs_m);
    }
    sample_motion();
    finalize_summary(log_, reason, now(), plant_.state().x);
  }

  const ScenarioConfig & cfg_;
  bus::VirtualClock clock_;
  bus::Bus bus_;
  PipelineTopics topics_;
  std::shared_ptr<bus::Subscriber<Frame>> det_sub_;
  std::shared_ptr<bus::Subscriber<Frame>> lane_sub_;
  std::shared_ptr<bus::Subscriber<EStopMsg>> estop_sub_;
  std::shared_ptr<bus::Subscriber<SteeringMsg>> steer_sub_;
  Scheduler sched_;
  control::EStopLatch latch_;
  control::MotorController motor_;
  Plant plant_;
  CameraNode camera_;
  DetectorNode detector_;
  LaneNode lane_;
  Duration period_;
  Duration lane_period_;
  RunLog log_;
  bool detector_busy_ = false;
  bool estop_sent_ = false;
  bool finished_ = false;
  std::uint64_t version_ = 0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t i)
{
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void finalize_summary(RunLog & log, EndReason reason, Timestamp end, double x_final)
{
  const ScenarioConfig & cfg = log.config;
  RunSummary & s = log.summary;
  s.end_reason = reason;
  s.end_ts = end;
  s.collision = reason == EndReason::kCollision;
  s.x_final = s.collision ? cfg.d_obs_m : x_final;
  s.stopping_distance_m = cfg.d_obs_m - s.x_final;
  if (cfg.obstacle && s.stopping_distance_m < 0.0) {
    s.stopping_distance_m = 0.0;
  }
  s.frames_scored = log.scores.size();
  try {
    s.velocity_estimate_mps = analysis::velocity_estimate(log);
  } catch (const ValidationError &) {
    s.velocity_estimate_mps = 0.0;
  }
}

RunLog run_scenario(const ScenarioConfig & config, std::shared_ptr<const ood::Scorer> scorer)
{
  config.validate();
  if (!scorer) {
    throw ValidationError("run_scenario needs a scorer");
  }
  VirtualRun run(config, std::move(scorer));
  return run.run();
}

RunLog run_scenario(const ScenarioConfig & config)
{
  config.validate();
  if (config.scorer == ScorerKind::kOracle && config.threshold) {
    return run_scenario(config, std::make_shared<OracleScorer>(config.oracle, *config.threshold));
  }
  auto model = config.scorer == ScorerKind::kVae ? load_model(config) : nullptr;
  const Calibration cal = calibrate(config, model);
  return run_scenario(config, make_scorer(config, cal, model));
}

ScenarioConfig campaign_run_config(const ScenarioConfig & base, const CampaignOptions & options, std::size_t i)
{
  ScenarioConfig c = base;
  c.seed = mix_seed(base.seed, i);
  if (!options.obstacles.empty()) {
    c.obstacle = options.obstacles[i % options.obstacles.size()];
  }
  return c;
}

CampaignResult run_campaign(const ScenarioConfig & base, const CampaignOptions & options)
{
  base.validate();
  if (options.runs < 1) {
    throw ValidationError("a campaign needs at least one run");
  }
  auto model = base.scorer == ScorerKind::kVae ? load_model(base) : nullptr;
  CampaignResult result;
  if (base.scorer == ScorerKind::kOracle && base.threshold) {
    result.calibration.scorer = ScorerKind::kOracle;
    result.calibration.quantile = base.quantile;
    result.calibration.detector.threshold = *base.threshold;
  } else {
    result.calibration = calibrate(base, model);
  }
  const auto scorer = make_scorer(base, result.calibration, model);
  result.threshold = scorer->threshold();

  std::vector<ScenarioConfig> configs;
  configs.reserve(options.runs);
  for (std::size_t i = 0; i < options.runs; ++i) {
    configs.push_back(campaign_run_config(base, options, i));
    configs.back().validate();
  }
  result.runs.resize(options.runs);
  std::vector<std::exception_ptr> errors(options.runs);
  const auto n = static_cast<long>(options.runs);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      result.runs[i] = run_scenario(configs[i], scorer);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto & e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
  return result;
}

}  // namespace oodsim::sim
