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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodsim/bus/stage_log.hpp"
#include "oodsim/core/time.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/vision/lanes.hpp"

namespace oodsim::sim
{

/// One frame the detector scored.
struct ScoredFrame
{
  std::uint64_t seq = 0;
  Timestamp capture{0};
  Timestamp ingest{0};
  Timestamp complete{0};
  /// Vehicle position when the frame was captured.
  double capture_x = 0.0;
  double score = 0.0;
  bool flagged = false;
  /// Per-dimension KL (empty for the oracle scorer).
  std::vector<double> kl;
};

/// A detector take: the frame consumed and the newest frame published at
/// that instant. Equal values mean the consumer got the newest frame.
struct TakeRecord
{
  Timestamp t{0};
  std::uint64_t taken_seq = 0;
  std::uint64_t newest_seq = 0;
};

/// Vehicle state right after a change (v holds until the next sample).
struct MotionSample
{
  Timestamp t{0};
  double x = 0.0;
  double v = 0.0;
};

struct SteeringSample
{
  Timestamp t{0};
  std::uint64_t frame_seq = 0;
  double angle_deg = 0.0;
  vision::LaneConfidence confidence = vision::LaneConfidence::kNone;
};

enum class EndReason : std::uint8_t { kStopped, kCollision, kTimeout };

std::string_view to_string(EndReason reason);
EndReason parse_end_reason(std::string_view text);

struct RunSummary
{
  /// max(0, d_obs - x_final); 0 means collision.
  double stopping_distance_m = 0.0;
  bool collision = false;
  double velocity_estimate_mps = 0.0;
  std::size_t frames_scored = 0;
  std::size_t frames_captured = 0;
  double x_final = 0.0;
  EndReason end_reason = EndReason::kTimeout;
  Timestamp end_ts{0};
  /// Frame whose verdict triggered the e-stop.
  std::optional<std::uint64_t> trigger_seq;
  /// Motor-zeroed time of the e-stop.
  std::optional<Timestamp> estop_ts;
};

struct RunLog
{
  ScenarioConfig config;
  std::string scorer;
  double threshold = 0.0;
  /// Latent subset of the vae scorer (empty for the oracle).
  std::vector<std::size_t> detector_subset;
  bus::StageLog stages;
  std::vector<ScoredFrame> scores;
  std::vector<TakeRecord> takes;
  std::vector<MotionSample> motion;
  std::vector<SteeringSample> steering;
  RunSummary summary;
};

/// Full run record (stage events excluded; they go to the CSV).
nlohmann::json to_json(const RunLog & log);
/// Rebuilds a run from its JSON record and stage CSV.
RunLog run_log_from_json(const nlohmann::json & j, bus::StageLog stages);

/// The JSON-lines summary record of a run.
nlohmann::json summary_record(const RunLog & log, std::size_t run_index);

/// Writes <stem>.json and <stem>.csv into dir.
void write_run(const std::filesystem::path & dir, std::string_view stem, const RunLog & log);
RunLog read_run(const std::filesystem::path & json_path);

/// "run_007" for index 7.
std::string run_stem(std::size_t index);

/// Every run_*.json in dir, sorted by name.
std::vector<RunLog> read_runs(const std::filesystem::path & dir);

}  // namespace oodsim::sim
