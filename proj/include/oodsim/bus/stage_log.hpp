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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodsim/bus/bus.hpp"
#include "oodsim/core/time.hpp"

namespace oodsim::bus
{

/// Pipeline stages in order.
enum class Stage : std::uint8_t { kCapture = 0, kIngest, kDetectDone, kEstopSent, kMotorZeroed };

inline constexpr std::size_t kStageCount = 5;
inline constexpr std::array<Stage, kStageCount> kAllStages{
  Stage::kCapture, Stage::kIngest, Stage::kDetectDone, Stage::kEstopSent, Stage::kMotorZeroed};

std::string_view to_string(Stage stage);

/// Raises ValidationError for names outside the stage enum.
Stage parse_stage(std::string_view name);

struct StageEvent
{
  std::uint64_t seq = 0;
  std::string topic;
  Stage stage = Stage::kCapture;
  Timestamp t{0};

  bool operator==(const StageEvent &) const = default;
};

using StageTimes = std::array<std::optional<Timestamp>, kStageCount>;

/// Append-only record of per-frame stage times. Thread-safe.
class StageLog
{
public:
  StageLog() = default;
  StageLog(const StageLog & other);
  StageLog & operator=(const StageLog & other);

  /// Appends (seq, stage, t). Raises OrderingError if the stage was already
  /// recorded for seq or if t breaks pipeline order against any recorded
  /// stage of the same seq.
  void record_hop(std::uint64_t seq, std::string_view topic, Stage stage, Timestamp t);

  template <typename T>
  void record_hop(const Envelope<T> & env, Stage stage, Timestamp t)
  {
    record_hop(env.seq, env.topic, stage, t);
  }

  /// Events in append order.
  std::vector<StageEvent> events() const;

  /// Recorded stage times of one frame (all empty if unknown).
  StageTimes times(std::uint64_t seq) const;

  /// Frame sequence numbers ascending.
  std::vector<std::uint64_t> sequences() const;

  /// Frames with every stage recorded, ascending.
  std::vector<std::uint64_t> complete_sequences() const;

  std::size_t size() const;

  bool operator==(const StageLog & other) const;

private:
  mutable std::mutex mutex_;
  std::vector<StageEvent> events_;
  std::map<std::uint64_t, StageTimes> by_seq_;
};

inline constexpr std::string_view kStageCsvHeader = "seq,topic,stage,timestamp_ns";

void write_stage_csv(std::ostream & out, const StageLog & log);
void write_stage_csv(const std::filesystem::path & path, const StageLog & log);

/// Parses and re-validates a stage CSV. Raises FormatError on malformed
/// rows and OrderingError on order violations.
StageLog read_stage_csv(std::istream & in);
StageLog read_stage_csv(const std::filesystem::path & path);

}  // namespace oodsim::bus
