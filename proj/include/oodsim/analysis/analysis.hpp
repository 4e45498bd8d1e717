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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oodsim/bus/stage_log.hpp"
#include "oodsim/sim/run_log.hpp"

namespace oodsim::analysis
{

/// Position on a piecewise-constant-speed motion trace at time t.
double position_at(std::span<const sim::MotionSample> motion, Timestamp t);

/// First sample with v > 0.
std::optional<Timestamp> motion_start(std::span<const sim::MotionSample> motion);

/// Distance covered from the first motion to the e-stop command (or the
/// end of the run when none was sent), divided by that elapsed time.
/// Raises ValidationError when nothing moved or no time elapsed.
double velocity_estimate(const sim::RunLog & log);

/// Mean of the two middle order statistics for even n.
double median(std::vector<double> values);

/// ceil(q * n)-th smallest value (1-based), n >= 1.
double nearest_rank(std::vector<double> values, double q);

/// 1-based order-statistic ranks (lo, hi) bracketing the median with at
/// least `confidence` coverage: lo is the largest j with
/// P(Bin(n, 1/2) <= j - 1) <= (1 - confidence) / 2 and hi = n - lo + 1.
/// Falls back to (1, n) when n is too small for any such j.
std::pair<std::size_t, std::size_t> median_ci_ranks(std::size_t n, double confidence = 0.95);

struct StoppingStats
{
  std::size_t runs = 0;
  std::size_t collisions = 0;
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t ci_low_rank = 0;
  std::size_t ci_high_rank = 0;
  double success_rate = 0.0;
};

/// Raises ValidationError on empty input or mismatched lengths.
StoppingStats stopping_stats(std::span<const double> distances, std::span<const bool> collisions);
StoppingStats stopping_stats(std::span<const sim::RunLog> logs);

struct LatencyStats
{
  std::string name;
  double min = 0.0;
  double median = 0.0;
  double p95 = 0.0;
  double max = 0.0;
  /// Seconds, in log order.
  std::vector<double> samples;
};

LatencyStats summarize_latency(std::string name, std::vector<double> samples);

/// Consecutive hops: capture->ingest, ingest->detect_done,
/// detect_done->estop_sent, estop_sent->motor_zeroed.
struct TimingSummary
{
  std::vector<LatencyStats> hops;
  /// capture->motor_zeroed over frames with all five stages.
  LatencyStats end_to_end;
  /// Hop with the largest median.
  std::string dominant;
};

/// Raises ValidationError when a frame records a stage without its
/// predecessor, or when no frame carries all five stages, and
/// OrderingError on stage times out of order.
TimingSummary timing_report(std::span<const bus::StageLog> logs);
TimingSummary timing_report(std::span<const sim::RunLog> logs);

/// Projected outcome of one run at one threshold.
struct Projection
{
  double distance_m = 0.0;
  std::optional<std::uint64_t> trigger_seq;
  bool out_of_risk = false;
};

/// Earliest scored frame with score > tau; stop position =
/// v_hat * (detect_done - motion_start + estop_hop) + coast, with the
/// run's recorded detect_done->motor_zeroed hop (or the configured one
/// when the run never stopped). Distance = max(0, d_obs - position); no
/// trigger projects a collision. A trigger whose estimated capture
/// position lies farther than the risk boundary counts as out_of_risk.
Projection project_run(const sim::RunLog & log, double tau);

struct SweepResult
{
  /// Ascending.
  std::vector<double> thresholds;
  /// distances[t][r].
  std::vector<std::vector<double>> distances;
  std::vector<std::size_t> collisions;
  std::vector<std::size_t> out_of_risk;
  std::size_t runs = 0;
};

/// Raises ValidationError on an empty threshold list or no runs, and
/// InvariantViolation if a monotonicity property fails.
SweepResult threshold_sweep(std::span<const sim::RunLog> logs, std::vector<double> thresholds);

/// Throws InvariantViolation naming the first run/threshold pair whose
/// projected distance increases with tau or whose out-of-risk count does.
void check_sweep_monotone(const SweepResult & sweep);

}  // namespace oodsim::analysis
