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

#include "oodsim/sim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::sim
{
namespace
{

using nlohmann::json;

// Gray levels of all obstacle colours stay below the default lane-mask
// threshold so obstacles never read as lane paint. Every obstacle is at
// least as tall as the camera mount, so its image only grows as it nears.
constexpr std::array<ObstacleSpec, kObstacleKindCount> kCatalog{{
  {"duck", 0.07, 0.10, {230, 200, 40}, 29.0},
  {"cone", 0.05, 0.12, {240, 120, 20}, 22.0},
  {"box", 0.10, 0.10, {150, 100, 60}, 6.5},
  {"bot", 0.12, 0.14, {60, 70, 110}, 3.3},
}};

void require(bool ok, std::string_view field, std::string_view what)
{
  if (!ok) {
    throw ValidationError(fmt::format("config field '{}' {}", field, what));
  }
}

void check_keys(const json & j, std::string_view section, std::initializer_list<std::string_view> allowed)
{
  if (!j.is_object()) {
    throw ValidationError(fmt::format("config section '{}' must be an object", section));
  }
  const std::set<std::string_view> keys(allowed);
  for (const auto & item : j.items()) {
    if (keys.count(item.key()) == 0) {
      throw ValidationError(fmt::format("unknown config key '{}.{}'", section, item.key()));
    }
  }
}

template <typename T>
void read(const json & j, const char * key, T & out, std::string_view section)
{
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ValidationError(fmt::format("config key '{}.{}': {}", section, key, e.what()));
  }
}

const json & section_or_empty(const json & j, const char * key)
{
  static const json kEmpty = json::object();
  return j.contains(key) ? j.at(key) : kEmpty;
}

}  // namespace

const ObstacleSpec & obstacle_spec(ObstacleKind kind)
{
  return kCatalog.at(static_cast<std::size_t>(kind));
}

ObstacleKind parse_obstacle(std::string_view name)
{
  for (std::size_t i = 0; i < kCatalog.size(); ++i) {
    if (kCatalog[i].name == name) {
      return static_cast<ObstacleKind>(i);
    }
  }
  throw ValidationError(fmt::format("unknown obstacle '{}' (expected duck, cone, box or bot)", name));
}

std::string_view to_string(ObstacleKind kind)
{
  return obstacle_spec(kind).name;
}

std::string_view to_string(ExecKind kind)
{
  switch (kind) {
    case ExecKind::kConstant:
      return "constant";
    case ExecKind::kLogNormal:
      return "lognormal";
    case ExecKind::kEmpirical:
      return "empirical";
  }
  return "?";
}

std::string_view to_string(ScorerKind kind)
{
  return kind == ScorerKind::kOracle ? "oracle" : "vae";
}

ScorerKind parse_scorer(std::string_view name)
{
  if (name == "oracle") {
    return ScorerKind::kOracle;
  }
  if (name == "vae") {
    return ScorerKind::kVae;
  }
  throw ValidationError(fmt::format("unknown scorer '{}' (expected vae or oracle)", name));
}

ExecTimeConfig ExecTimeConfig::constant(double seconds)
{
  ExecTimeConfig c;
  c.kind = ExecKind::kConstant;
  c.constant_s = seconds;
  return c;
}

ExecTimeConfig ExecTimeConfig::lognormal(double median, double sigma)
{
  ExecTimeConfig c;
  c.kind = ExecKind::kLogNormal;
  c.median_s = median;
  c.sigma = sigma;
  return c;
}

ExecTimeConfig ExecTimeConfig::empirical(std::vector<double> samples)
{
  ExecTimeConfig c;
  c.kind = ExecKind::kEmpirical;
  c.samples = std::move(samples);
  return c;
}

void ExecTimeConfig::validate() const
{
  switch (kind) {
    case ExecKind::kConstant:
      require(std::isfinite(constant_s) && constant_s > 0.0, "detector.exec.constant_s", "must be > 0");
      break;
    case ExecKind::kLogNormal:
      require(std::isfinite(median_s) && median_s > 0.0, "detector.exec.median_s", "must be > 0");
      require(std::isfinite(sigma) && sigma >= 0.0, "detector.exec.sigma", "must be >= 0");
      break;
    case ExecKind::kEmpirical:
      require(!samples.empty(), "detector.exec.samples", "must not be empty");
      for (const double s : samples) {
        require(std::isfinite(s) && s > 0.0, "detector.exec.samples", "entries must be > 0");
      }
      break;
  }
}

void ScenarioConfig::validate() const
{
  require(std::isfinite(d_obs_m) && d_obs_m > 0.0, "scene.d_obs_m", "must be > 0");
  require(std::isfinite(risk_m) && risk_m > 0.0 && risk_m < d_obs_m, "scene.risk_m", "must satisfy 0 < risk_m < d_obs_m");
  require(std::isfinite(illumination) && illumination > 0.0, "scene.illumination", "must be > 0");
  require(std::isfinite(speed_mps) && speed_mps > 0.0, "motion.speed_mps", "must be > 0");
  require(std::isfinite(v_max_mps) && v_max_mps >= speed_mps, "motion.v_max_mps", "must be >= speed_mps");
  require(std::isfinite(coast_m) && coast_m >= 0.0, "motion.coast_m", "must be >= 0");
  require(std::isfinite(max_duration_s) && max_duration_s > 0.0, "motion.max_duration_s", "must be > 0");
  require(std::isfinite(camera_hz) && camera_hz > 0.0, "rates.camera_hz", "must be > 0");
  require(std::isfinite(lane_hz) && lane_hz > 0.0, "rates.lane_hz", "must be > 0");
  exec.validate();
  require(std::isfinite(quantile) && quantile > 0.0 && quantile <= 1.0, "detector.quantile", "must lie in (0, 1]");
  require(calibration_frames >= 1, "detector.calibration_frames", "must be >= 1");
  require(scorer != ScorerKind::kVae || !weights.empty(), "detector.weights", "is required for the vae scorer");
  require(!threshold || std::isfinite(*threshold), "detector.threshold", "must be finite");
  require(std::isfinite(oracle.s_base), "detector.oracle.s_base", "must be finite");
  require(std::isfinite(oracle.s_jitter) && oracle.s_jitter >= 0.0, "detector.oracle.s_jitter", "must be >= 0");
  require(std::isfinite(ingest_latency_s) && ingest_latency_s >= 0.0, "latency.ingest_s", "must be >= 0");
  require(std::isfinite(estop_latency_s) && estop_latency_s >= 0.0, "latency.estop_s", "must be >= 0");
  require(std::isfinite(steer_gain) && steer_gain >= 0.0, "control.steer_gain", "must be >= 0");
  require(std::isfinite(pid.kp) && std::isfinite(pid.ki) && std::isfinite(pid.kd), "control", "gains must be finite");
}

Duration ScenarioConfig::camera_period() const
{
  return Duration{std::llround(1e9 / camera_hz)};
}

Duration ScenarioConfig::lane_period() const
{
  return Duration{std::llround(1e9 / lane_hz)};
}

json to_json(const ScenarioConfig & c)
{
  json exec = {{"kind", to_string(c.exec.kind)}};
  switch (c.exec.kind) {
    case ExecKind::kConstant:
      exec["constant_s"] = c.exec.constant_s;
      break;
    case ExecKind::kLogNormal:
      exec["median_s"] = c.exec.median_s;
      exec["sigma"] = c.exec.sigma;
      break;
    case ExecKind::kEmpirical:
      exec["samples"] = c.exec.samples;
      break;
  }
  json j;
  j["scene"] = {
    {"d_obs_m", c.d_obs_m},
    {"risk_m", c.risk_m},
    {"obstacle", c.obstacle ? json(to_string(*c.obstacle)) : json(nullptr)},
    {"illumination", c.illumination}};
  j["motion"] = {
    {"speed_mps", c.speed_mps}, {"v_max_mps", c.v_max_mps}, {"coast_m", c.coast_m}, {"max_duration_s", c.max_duration_s}};
  j["rates"] = {{"camera_hz", c.camera_hz}, {"lane_hz", c.lane_hz}};
  j["detector"] = {
    {"scorer", to_string(c.scorer)},
    {"weights", c.weights},
    {"quantile", c.quantile},
    {"calibration_frames", c.calibration_frames},
    {"threshold", c.threshold ? json(*c.threshold) : json(nullptr)},
    {"exec", exec},
    {"oracle", {{"s_base", c.oracle.s_base}, {"s_jitter", c.oracle.s_jitter}}}};
  j["latency"] = {{"ingest_s", c.ingest_latency_s}, {"estop_s", c.estop_latency_s}};
  j["control"] = {{"kp", c.pid.kp}, {"ki", c.pid.ki}, {"kd", c.pid.kd}, {"steer_gain", c.steer_gain}};
  j["seed"] = c.seed;
  return j;
}

ScenarioConfig config_from_json(const json & j)
{
  check_keys(j, "<root>", {"scene", "motion", "rates", "detector", "latency", "control", "seed"});
  ScenarioConfig c;

  const json & scene = section_or_empty(j, "scene");
  check_keys(scene, "scene", {"d_obs_m", "risk_m", "obstacle", "illumination"});
  read(scene, "d_obs_m", c.d_obs_m, "scene");
  read(scene, "risk_m", c.risk_m, "scene");
  read(scene, "illumination", c.illumination, "scene");
  if (scene.contains("obstacle")) {
    const json & o = scene.at("obstacle");
    if (o.is_null() || (o.is_string() && o.get<std::string>() == "none")) {
      c.obstacle.reset();
    } else if (o.is_string()) {
      c.obstacle = parse_obstacle(o.get<std::string>());
    } else {
      throw ValidationError("config key 'scene.obstacle' must be a string or null");
    }
  }

  const json & motion = section_or_empty(j, "motion");
  check_keys(motion, "motion", {"speed_mps", "v_max_mps", "coast_m", "max_duration_s"});
  read(motion, "speed_mps", c.speed_mps, "motion");
  read(motion, "v_max_mps", c.v_max_mps, "motion");
  read(motion, "coast_m", c.coast_m, "motion");
  read(motion, "max_duration_s", c.max_duration_s, "motion");

  const json & rates = section_or_empty(j, "rates");
  check_keys(rates, "rates", {"camera_hz", "lane_hz"});
  read(rates, "camera_hz", c.camera_hz, "rates");
  read(rates, "lane_hz", c.lane_hz, "rates");

  const json & det = section_or_empty(j, "detector");
  check_keys(det, "detector", {"scorer", "weights", "quantile", "calibration_frames", "threshold", "exec", "oracle"});
  if (det.contains("scorer")) {
    std::string name;
    read(det, "scorer", name, "detector");
    c.scorer = parse_scorer(name);
  }
  read(det, "weights", c.weights, "detector");
  read(det, "quantile", c.quantile, "detector");
  read(det, "calibration_frames", c.calibration_frames, "detector");
  if (det.contains("threshold") && !det.at("threshold").is_null()) {
    double t = 0.0;
    read(det, "threshold", t, "detector");
    c.threshold = t;
  }
  const json & exec = section_or_empty(det, "exec");
  check_keys(exec, "detector.exec", {"kind", "constant_s", "median_s", "sigma", "samples"});
  if (exec.contains("kind")) {
    std::string kind;
    read(exec, "kind", kind, "detector.exec");
    if (kind == "constant") {
      c.exec.kind = ExecKind::kConstant;
    } else if (kind == "lognormal") {
      c.exec.kind = ExecKind::kLogNormal;
    } else if (kind == "empirical") {
      c.exec.kind = ExecKind::kEmpirical;
    } else {
      throw ValidationError(fmt::format("unknown exec kind '{}' (expected constant, lognormal or empirical)", kind));
    }
  }
  read(exec, "constant_s", c.exec.constant_s, "detector.exec");
  read(exec, "median_s", c.exec.median_s, "detector.exec");
  read(exec, "sigma", c.exec.sigma, "detector.exec");
  read(exec, "samples", c.exec.samples, "detector.exec");
  const json & oracle = section_or_empty(det, "oracle");
  check_keys(oracle, "detector.oracle", {"s_base", "s_jitter"});
  read(oracle, "s_base", c.oracle.s_base, "detector.oracle");
  read(oracle, "s_jitter", c.oracle.s_jitter, "detector.oracle");

  const json & lat = section_or_empty(j, "latency");
  check_keys(lat, "latency", {"ingest_s", "estop_s"});
  read(lat, "ingest_s", c.ingest_latency_s, "latency");
  read(lat, "estop_s", c.estop_latency_s, "latency");

  const json & ctl = section_or_empty(j, "control");
  check_keys(ctl, "control", {"kp", "ki", "kd", "steer_gain"});
  read(ctl, "kp", c.pid.kp, "control");
  read(ctl, "ki", c.pid.ki, "control");
  read(ctl, "kd", c.pid.kd, "control");
  read(ctl, "steer_gain", c.steer_gain, "control");

  read(j, "seed", c.seed, "<root>");
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open config '{}'", path.string()));
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception & e) {
    throw FormatError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

void save_config(const std::filesystem::path & path, const ScenarioConfig & config)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError(fmt::format("cannot write config '{}'", path.string()));
  }
  out << to_json(config).dump(2) << '\n';
}

}  // namespace oodsim::sim
