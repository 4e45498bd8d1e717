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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

#include "oodsim/bus/clock.hpp"
#include "oodsim/ood/scorer.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/calibration.hpp"
#include "oodsim/sim/run_log.hpp"

namespace oodsim::sim
{

/// Single-threaded discrete-event scheduler. Events run in order of
/// (time, priority, insertion); the clock is advanced to each event's time
/// before it runs.
class Scheduler
{
public:
  /// Lower runs first among events at the same instant.
  static constexpr int kTerminal = 0;
  static constexpr int kNormal = 1;

  explicit Scheduler(bus::VirtualClock & clock) : clock_(clock) {}

  /// Raises OrderingError when t lies in the past.
  void at(Timestamp t, std::function<void()> fn, int priority = kNormal);

  /// Runs the next event; false when none is pending or stop() was called.
  bool step();

  /// Runs events until the queue drains or stop() is called.
  void run();

  void stop() { stopped_ = true; }
  bool stopped() const { return stopped_; }
  std::size_t pending() const { return queue_.size(); }
  std::uint64_t executed() const { return executed_; }

private:
  struct Event
  {
    Timestamp t;
    int priority;
    std::uint64_t order;
    std::function<void()> fn;
  };
  struct Later
  {
    bool operator()(const Event & a, const Event & b) const;
  };

  bus::VirtualClock & clock_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t next_order_ = 0;
  std::uint64_t executed_ = 0;
  bool stopped_ = false;
};

/// Fills the run summary at the end of a run. A collision pins x_final to
/// d_obs.
void finalize_summary(RunLog & log, EndReason reason, Timestamp end, double x_final);

/// Runs one closed-loop scenario under the virtual clock with the given
/// scorer. Deterministic in (config, scorer).
RunLog run_scenario(const ScenarioConfig & config, std::shared_ptr<const ood::Scorer> scorer);

/// Calibrates the configured scorer (unless config.threshold is set) and
/// runs the scenario.
RunLog run_scenario(const ScenarioConfig & config);

struct CampaignOptions
{
  std::size_t runs = 40;
  /// Run i uses obstacles[i % size]; all four kinds by default.
  std::vector<ObstacleKind> obstacles{ObstacleKind::kDuck, ObstacleKind::kCone, ObstacleKind::kBox, ObstacleKind::kBot};
};

struct CampaignResult
{
  double threshold = 0.0;
  Calibration calibration;
  std::vector<RunLog> runs;
};

/// Configuration of run i: seed derived from (base.seed, i), obstacle from
/// the rotation.
ScenarioConfig campaign_run_config(const ScenarioConfig & base, const CampaignOptions & options, std::size_t i);

/// Calibrates once, then runs every scenario (in parallel); results are
/// ordered by run index.
CampaignResult run_campaign(const ScenarioConfig & base, const CampaignOptions & options);

}  // namespace oodsim::sim
