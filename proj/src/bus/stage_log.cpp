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

#include "oodsim/bus/stage_log.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::bus
{
namespace
{

constexpr std::array<std::string_view, kStageCount> kStageNames{
  "capture", "ingest", "detect_done", "estop_sent", "motor_zeroed"};

template <typename Int>
Int parse_int(std::string_view text, std::size_t line, std::string_view what)
{
  Int value{};
  const auto * end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw FormatError(fmt::format("stage log line {}: bad {} '{}'", line, what, text));
  }
  return value;
}

}  // namespace

std::string_view to_string(Stage stage)
{
  return kStageNames.at(static_cast<std::size_t>(stage));
}

Stage parse_stage(std::string_view name)
{
  for (std::size_t i = 0; i < kStageCount; ++i) {
    if (kStageNames[i] == name) {
      return static_cast<Stage>(i);
    }
  }
  throw ValidationError(fmt::format("unknown stage '{}'", name));
}

StageLog::StageLog(const StageLog & other)
{
  std::lock_guard lock(other.mutex_);
  events_ = other.events_;
  by_seq_ = other.by_seq_;
}

StageLog & StageLog::operator=(const StageLog & other)
{
  if (this != &other) {
    std::scoped_lock lock(mutex_, other.mutex_);
    events_ = other.events_;
    by_seq_ = other.by_seq_;
  }
  return *this;
}

void StageLog::record_hop(std::uint64_t seq, std::string_view topic, Stage stage, Timestamp t)
{
  const auto idx = static_cast<std::size_t>(stage);
  if (idx >= kStageCount) {
    throw ValidationError(fmt::format("unknown stage index {}", idx));
  }
  std::lock_guard lock(mutex_);
  StageTimes & times = by_seq_[seq];
  if (times[idx]) {
    throw OrderingError(fmt::format("seq {}: stage {} recorded twice", seq, to_string(stage)));
  }
  for (std::size_t j = 0; j < kStageCount; ++j) {
    if (!times[j]) {
      continue;
    }
    const bool bad = (j < idx && t < *times[j]) || (j > idx && t > *times[j]);
    if (bad) {
      throw OrderingError(fmt::format(
        "seq {}: stage {} at {} ns is out of order with {} at {} ns", seq, to_string(stage), t.count(),
        kStageNames[j], times[j]->count()));
    }
  }
  times[idx] = t;
  events_.push_back({seq, std::string(topic), stage, t});
}

std::vector<StageEvent> StageLog::events() const
{
  std::lock_guard lock(mutex_);
  return events_;
}

StageTimes StageLog::times(std::uint64_t seq) const
{
  std::lock_guard lock(mutex_);
  const auto it = by_seq_.find(seq);
  return it == by_seq_.end() ? StageTimes{} : it->second;
}

std::vector<std::uint64_t> StageLog::sequences() const
{
  std::lock_guard lock(mutex_);
  std::vector<std::uint64_t> out;
  out.reserve(by_seq_.size());
  for (const auto & [seq, _] : by_seq_) {
    out.push_back(seq);
  }
  return out;
}

std::vector<std::uint64_t> StageLog::complete_sequences() const
{
  std::lock_guard lock(mutex_);
  std::vector<std::uint64_t> out;
  for (const auto & [seq, times] : by_seq_) {
    bool all = true;
    for (const auto & t : times) {
      all = all && t.has_value();
    }
    if (all) {
      out.push_back(seq);
    }
  }
  return out;
}

std::size_t StageLog::size() const
{
  std::lock_guard lock(mutex_);
  return events_.size();
}

bool StageLog::operator==(const StageLog & other) const
{
  if (this == &other) {
    return true;
  }
  std::scoped_lock lock(mutex_, other.mutex_);
  return events_ == other.events_;
}

void write_stage_csv(std::ostream & out, const StageLog & log)
{
  out << kStageCsvHeader << '\n';
  for (const auto & e : log.events()) {
    out << e.seq << ',' << e.topic << ',' << to_string(e.stage) << ',' << e.t.count() << '\n';
  }
}

void write_stage_csv(const std::filesystem::path & path, const StageLog & log)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw FormatError(fmt::format("cannot open '{}' for writing", path.string()));
  }
  write_stage_csv(out, log);
}

StageLog read_stage_csv(std::istream & in)
{
  StageLog log;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line != kStageCsvHeader) {
    throw FormatError(fmt::format("stage log must start with '{}'", kStageCsvHeader));
  }
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::array<std::string_view, 4> fields;
    std::string_view rest(line);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto comma = rest.find(',');
      if ((i < 3) == (comma == std::string_view::npos)) {
        throw FormatError(fmt::format("stage log line {}: expected 4 fields", line_no));
      }
      fields[i] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    const auto seq = parse_int<std::uint64_t>(fields[0], line_no, "seq");
    const auto ns = parse_int<std::int64_t>(fields[3], line_no, "timestamp");
    Stage stage{};
    try {
      stage = parse_stage(fields[2]);
    } catch (const ValidationError & e) {
      throw FormatError(fmt::format("stage log line {}: {}", line_no, e.what()));
    }
    log.record_hop(seq, fields[1], stage, Timestamp{ns});
  }
  return log;
}

StageLog read_stage_csv(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(fmt::format("cannot open '{}'", path.string()));
  }
  return read_stage_csv(in);
}

}  // namespace oodsim::bus
