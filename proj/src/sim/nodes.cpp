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

#include "oodsim/sim/nodes.hpp"

#include <string>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/sim/render.hpp"

namespace oodsim::sim
{

PipelineTopics create_pipeline_topics(bus::Bus & bus)
{
  const auto queue = bus::TopicPolicy::queue(bus::kDefaultQueueCapacity);
  PipelineTopics t;
  t.camera = bus.create_topic<Frame>(std::string(kCameraTopic), bus::TopicPolicy::latest());
  t.ood = bus.create_topic<ood::OODResult>(std::string(kOodTopic), queue);
  t.estop = bus.create_topic<EStopMsg>(std::string(kEstopTopic), queue);
  t.steering = bus.create_topic<SteeringMsg>(std::string(kSteeringTopic), queue);
  return t;
}

Frame CameraNode::capture(std::uint64_t seq, Timestamp t, double vehicle_x) const
{
  return capture_frame(config_, vehicle_x, seq, t);
}

Frame CameraNode::capture_deferred(std::uint64_t seq, Timestamp t, double vehicle_x) const
{
  Frame f;
  f.seq = seq;
  f.capture_ts = t;
  f.truth = scene_truth(make_scene(config_, vehicle_x, seq), vehicle_x);
  return f;
}

void CameraNode::develop(Frame & frame)
{
  if (frame.image) {
    return;
  }
  if (!cached_ || cached_seq_ != frame.seq) {
    cached_ = std::make_shared<const vision::Image>(render_frame(config_, frame.truth.vehicle_x_m, frame.seq));
    cached_seq_ = frame.seq;
  }
  frame.image = cached_;
}

DetectorNode::DetectorNode(std::shared_ptr<const ood::Scorer> scorer, const ExecTimeConfig & exec, std::uint64_t seed)
: scorer_(std::move(scorer)), exec_(exec, seed)
{
  if (!scorer_) {
    throw ValidationError("detector node needs a scorer");
  }
}

DetectorNode::Work DetectorNode::process(const Frame & frame, Timestamp ingest)
{
  Work w;
  auto out = scorer_->evaluate(frame);
  w.exec = exec_.sample();
  w.result.seq = frame.seq;
  w.result.kl = std::move(out.kl);
  w.result.score = out.score;
  w.result.flagged = ood::classify(out.score, scorer_->threshold()) == ood::Verdict::kOutOfDistribution;
  w.result.ingest = ingest;
  w.result.complete = ingest + w.exec;
  return w;
}

SteeringMsg LaneNode::process(const Frame & frame)
{
  if (!frame.image) {
    throw ValidationError(fmt::format("frame {} carries no image", frame.seq));
  }
  const auto est = follower_.process(*frame.image);
  return {frame.seq, est.angle_deg, est.confidence};
}

control::MotorParams motor_params(const ScenarioConfig & config)
{
  control::MotorParams p;
  p.gains = config.pid;
  p.v_nominal = config.speed_mps;
  p.v_max = config.v_max_mps;
  p.steer_gain = config.steer_gain;
  return p;
}

std::uint64_t exec_seed(const ScenarioConfig & config)
{
  return config.seed ^ 0xE8EC7130E0000000ULL;
}

}  // namespace oodsim::sim
