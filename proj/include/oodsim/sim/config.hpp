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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodsim/control/pid.hpp"
#include "oodsim/core/time.hpp"

namespace oodsim::sim
{

enum class ObstacleKind : std::uint8_t { kDuck = 0, kCone, kBox, kBot };

inline constexpr std::size_t kObstacleKindCount = 4;

struct Rgb
{
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

/// Appearance and oracle response of one obstacle variant.
struct ObstacleSpec
{
  std::string_view name;
  double width_m = 0.0;
  double height_m = 0.0;
  Rgb color;
  /// Oracle score per unit of detector-view coverage.
  double gain = 0.0;
};

const ObstacleSpec & obstacle_spec(ObstacleKind kind);

/// Raises ValidationError for unknown names.
ObstacleKind parse_obstacle(std::string_view name);

std::string_view to_string(ObstacleKind kind);

enum class ExecKind : std::uint8_t { kConstant, kLogNormal, kEmpirical };

std::string_view to_string(ExecKind kind);

struct ExecTimeConfig
{
  ExecKind kind = ExecKind::kLogNormal;
  /// Constant duration (s).
  double constant_s = 0.542;
  /// LogNormal median (s) and log-space standard deviation.
  double median_s = 0.542;
  double sigma = 0.35;
  /// Empirical durations (s), cycled in order.
  std::vector<double> samples;

  static ExecTimeConfig constant(double seconds);
  static ExecTimeConfig lognormal(double median, double sigma);
  static ExecTimeConfig empirical(std::vector<double> samples);

  void validate() const;
};

enum class ScorerKind : std::uint8_t { kOracle, kVae };

std::string_view to_string(ScorerKind kind);
ScorerKind parse_scorer(std::string_view name);

struct OracleParams
{
  /// Score of an empty scene under nominal illumination.
  double s_base = 1.0;
  /// Score per unit of |illumination - 1|.
  double s_jitter = 1.0;
};

struct ScenarioConfig
{
  // Geometry and motion.
  double d_obs_m = 0.70;
  double risk_m = 0.60;
  double speed_mps = 0.10;
  double v_max_mps = 0.5;
  /// Distance travelled after the e-stop latches.
  double coast_m = 0.0;
  double max_duration_s = 30.0;
  /// Empty lane when unset.
  std::optional<ObstacleKind> obstacle = ObstacleKind::kDuck;
  double illumination = 1.0;

  // Rates.
  double camera_hz = 30.0;
  double lane_hz = 5.0;

  // Detector.
  ExecTimeConfig exec{};
  double quantile = 0.8;
  std::size_t calibration_frames = 620;
  ScorerKind scorer = ScorerKind::kOracle;
  std::string weights;
  OracleParams oracle{};
  /// Skips calibration when set.
  std::optional<double> threshold;

  // Hop latencies (s).
  double ingest_latency_s = 0.015;
  double estop_latency_s = 0.005;

  // Control.
  control::PidGains pid{};
  double steer_gain = 0.1;

  std::uint64_t seed = 7;

  /// Raises ValidationError naming the offending field.
  void validate() const;

  Duration camera_period() const;
  Duration lane_period() const;
};

nlohmann::json to_json(const ScenarioConfig & config);

/// Unknown keys raise ValidationError; missing keys keep their defaults.
ScenarioConfig config_from_json(const nlohmann::json & j);

ScenarioConfig load_config(const std::filesystem::path & path);
void save_config(const std::filesystem::path & path, const ScenarioConfig & config);

}  // namespace oodsim::sim
