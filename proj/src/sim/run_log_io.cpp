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

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/sim/run_log.hpp"

namespace oodsim::sim
{
namespace
{

using nlohmann::json;

json opt_ns(const std::optional<Timestamp> & t)
{
  return t ? json(t->count()) : json(nullptr);
}

std::optional<Timestamp> read_opt_ns(const json & j)
{
  return j.is_null() ? std::nullopt : std::optional<Timestamp>(Timestamp{j.get<std::int64_t>()});
}

void write_text(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  out << text;
}

}  // namespace

std::string_view to_string(EndReason reason)
{
  switch (reason) {
    case EndReason::kStopped:
      return "stopped";
    case EndReason::kCollision:
      return "collision";
    case EndReason::kTimeout:
      return "timeout";
  }
  return "?";
}

EndReason parse_end_reason(std::string_view text)
{
  if (text == "stopped") {
    return EndReason::kStopped;
  }
  if (text == "collision") {
    return EndReason::kCollision;
  }
  if (text == "timeout") {
    return EndReason::kTimeout;
  }
  throw FormatError(fmt::format("unknown end reason '{}'", text));
}

json to_json(const RunLog & log)
{
  const RunSummary & s = log.summary;
  json j;
  j["config"] = to_json(log.config);
  j["scorer"] = log.scorer;
  j["threshold"] = log.threshold;
  j["detector_subset"] = log.detector_subset;
  j["summary"] = {
    {"stopping_distance_m", s.stopping_distance_m},
    {"collision", s.collision},
    {"velocity_estimate_mps", s.velocity_estimate_mps},
    {"frames_scored", s.frames_scored},
    {"frames_captured", s.frames_captured},
    {"x_final", s.x_final},
    {"end_reason", to_string(s.end_reason)},
    {"end_ns", s.end_ts.count()},
    {"trigger_seq", s.trigger_seq ? json(*s.trigger_seq) : json(nullptr)},
    {"estop_ns", opt_ns(s.estop_ts)}};
  json scores = json::array();
  for (const auto & f : log.scores) {
    scores.push_back({
      {"seq", f.seq},
      {"capture_ns", f.capture.count()},
      {"ingest_ns", f.ingest.count()},
      {"complete_ns", f.complete.count()},
      {"capture_x", f.capture_x},
      {"score", f.score},
      {"flagged", f.flagged},
      {"kl", f.kl}});
  }
  j["scores"] = std::move(scores);
  json takes = json::array();
  for (const auto & t : log.takes) {
    takes.push_back({t.t.count(), t.taken_seq, t.newest_seq});
  }
  j["takes"] = std::move(takes);
  json motion = json::array();
  for (const auto & m : log.motion) {
    motion.push_back({m.t.count(), m.x, m.v});
  }
  j["motion"] = std::move(motion);
  json steering = json::array();
  for (const auto & st : log.steering) {
    steering.push_back({st.t.count(), st.frame_seq, st.angle_deg, static_cast<int>(st.confidence)});
  }
  j["steering"] = std::move(steering);
  return j;
}

RunLog run_log_from_json(const json & j, bus::StageLog stages)
{
  try {
    RunLog log;
    log.config = config_from_json(j.at("config"));
    log.scorer = j.at("scorer").get<std::string>();
    log.threshold = j.at("threshold").get<double>();
    log.detector_subset = j.at("detector_subset").get<std::vector<std::size_t>>();
    log.stages = std::move(stages);
    const json & s = j.at("summary");
    RunSummary & r = log.summary;
    r.stopping_distance_m = s.at("stopping_distance_m").get<double>();
    r.collision = s.at("collision").get<bool>();
    r.velocity_estimate_mps = s.at("velocity_estimate_mps").get<double>();
    r.frames_scored = s.at("frames_scored").get<std::size_t>();
    r.frames_captured = s.at("frames_captured").get<std::size_t>();
    r.x_final = s.at("x_final").get<double>();
    r.end_reason = parse_end_reason(s.at("end_reason").get<std::string>());
    r.end_ts = Timestamp{s.at("end_ns").get<std::int64_t>()};
    if (!s.at("trigger_seq").is_null()) {
      r.trigger_seq = s.at("trigger_seq").get<std::uint64_t>();
    }
    r.estop_ts = read_opt_ns(s.at("estop_ns"));
    for (const auto & f : j.at("scores")) {
      ScoredFrame sf;
      sf.seq = f.at("seq").get<std::uint64_t>();
      sf.capture = Timestamp{f.at("capture_ns").get<std::int64_t>()};
      sf.ingest = Timestamp{f.at("ingest_ns").get<std::int64_t>()};
      sf.complete = Timestamp{f.at("complete_ns").get<std::int64_t>()};
      sf.capture_x = f.at("capture_x").get<double>();
      sf.score = f.at("score").get<double>();
      sf.flagged = f.at("flagged").get<bool>();
      sf.kl = f.at("kl").get<std::vector<double>>();
      log.scores.push_back(std::move(sf));
    }
    for (const auto & t : j.at("takes")) {
      log.takes.push_back({Timestamp{t.at(0).get<std::int64_t>()}, t.at(1).get<std::uint64_t>(), t.at(2).get<std::uint64_t>()});
    }
    for (const auto & m : j.at("motion")) {
      log.motion.push_back({Timestamp{m.at(0).get<std::int64_t>()}, m.at(1).get<double>(), m.at(2).get<double>()});
    }
    for (const auto & st : j.at("steering")) {
      const int conf = st.at(3).get<int>();
      if (conf < 0 || conf > 2) {
        throw FormatError(fmt::format("steering confidence {} out of range", conf));
      }
      log.steering.push_back(
        {Timestamp{st.at(0).get<std::int64_t>()}, st.at(1).get<std::uint64_t>(), st.at(2).get<double>(),
         static_cast<vision::LaneConfidence>(conf)});
    }
    return log;
  } catch (const json::exception & e) {
    throw FormatError(fmt::format("malformed run record: {}", e.what()));
  }
}

json summary_record(const RunLog & log, std::size_t run_index)
{
  const RunSummary & s = log.summary;
  return {
    {"run", run_index},
    {"seed", log.config.seed},
    {"obstacle", log.config.obstacle ? json(to_string(*log.config.obstacle)) : json(nullptr)},
    {"threshold", log.threshold},
    {"stopping_distance_m", s.stopping_distance_m},
    {"collision", s.collision},
    {"velocity_estimate_mps", s.velocity_estimate_mps},
    {"frames_scored", s.frames_scored},
    {"end_reason", to_string(s.end_reason)}};
}

std::string run_stem(std::size_t index)
{
  return fmt::format("run_{:03d}", index);
}

void write_run(const std::filesystem::path & dir, std::string_view stem, const RunLog & log)
{
  std::filesystem::create_directories(dir);
  write_text(dir / fmt::format("{}.json", stem), to_json(log).dump(1) + "\n");
  bus::write_stage_csv(dir / fmt::format("{}.csv", stem), log.stages);
}

RunLog read_run(const std::filesystem::path & json_path)
{
  std::ifstream in(json_path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open run log '{}'", json_path.string()));
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error & e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", json_path.string(), e.what()));
  }
  auto csv = json_path;
  csv.replace_extension(".csv");
  return run_log_from_json(j, bus::read_stage_csv(csv));
}

std::vector<RunLog> read_runs(const std::filesystem::path & dir)
{
  if (!std::filesystem::is_directory(dir)) {
    throw ValidationError(fmt::format("'{}' is not a directory", dir.string()));
  }
  std::vector<std::filesystem::path> paths;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  std::vector<RunLog> logs;
  logs.reserve(paths.size());
  for (const auto & p : paths) {
    logs.push_back(read_run(p));
  }
  return logs;
}

}  // namespace oodsim::sim
