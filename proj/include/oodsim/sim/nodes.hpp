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

#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "oodsim/bus/bus.hpp"
#include "oodsim/control/motor.hpp"
#include "oodsim/core/frame.hpp"
#include "oodsim/ood/detector.hpp"
#include "oodsim/ood/scorer.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/exec_time.hpp"
#include "oodsim/vision/lanes.hpp"

namespace oodsim::sim
{

inline constexpr std::string_view kCameraTopic = "camera";
inline constexpr std::string_view kOodTopic = "ood";
inline constexpr std::string_view kEstopTopic = "estop";
inline constexpr std::string_view kSteeringTopic = "steering";
inline constexpr std::string_view kMotorTopic = "motor";

struct SteeringMsg
{
  std::uint64_t frame_seq = 0;
  double angle_deg = 0.0;
  vision::LaneConfidence confidence = vision::LaneConfidence::kNone;
};

struct EStopMsg
{
  std::uint64_t frame_seq = 0;
  double score = 0.0;
};

/// The pipeline's topics: camera is Latest, the rest Queue(8).
struct PipelineTopics
{
  std::shared_ptr<bus::Topic<Frame>> camera;
  std::shared_ptr<bus::Topic<ood::OODResult>> ood;
  std::shared_ptr<bus::Topic<EStopMsg>> estop;
  std::shared_ptr<bus::Topic<SteeringMsg>> steering;
};

PipelineTopics create_pipeline_topics(bus::Bus & bus);

/// Renders frames of the scenario.
class CameraNode
{
public:
  explicit CameraNode(const ScenarioConfig & config) : config_(config) {}

  Frame capture(std::uint64_t seq, Timestamp t, double vehicle_x) const;

  /// Same frame with the image left empty; `develop` renders it on first use.
  /// Rendering is a pure function of (config, x, seq), so the result is
  /// identical to `capture`.
  Frame capture_deferred(std::uint64_t seq, Timestamp t, double vehicle_x) const;

  /// Fills frame.image if empty, reusing the most recent render of the same seq.
  void develop(Frame & frame);

private:
  const ScenarioConfig & config_;
  std::uint64_t cached_seq_ = 0;
  std::shared_ptr<const vision::Image> cached_;
};

/// Scores a frame and draws how long that took.
class DetectorNode
{
public:
  struct Work
  {
    ood::OODResult result;
    Duration exec{0};
  };

  DetectorNode(std::shared_ptr<const ood::Scorer> scorer, const ExecTimeConfig & exec, std::uint64_t seed);

  /// result.ingest = ingest, result.complete = ingest + exec.
  Work process(const Frame & frame, Timestamp ingest);

  const ood::Scorer & scorer() const { return *scorer_; }

private:
  std::shared_ptr<const ood::Scorer> scorer_;
  ExecTimeModel exec_;
};

/// Lane following on the camera frame.
class LaneNode
{
public:
  explicit LaneNode(vision::LaneParams params = {}) : follower_(params) {}

  SteeringMsg process(const Frame & frame);

private:
  vision::LaneFollower follower_;
};

control::MotorParams motor_params(const ScenarioConfig & config);

/// Seed of the execution-time stream of a run.
std::uint64_t exec_seed(const ScenarioConfig & config);

}  // namespace oodsim::sim
