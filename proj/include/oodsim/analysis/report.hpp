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

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "oodsim/analysis/analysis.hpp"
#include "oodsim/sim/run_log.hpp"

namespace oodsim::analysis
{

nlohmann::json to_json(const StoppingStats & stats);
nlohmann::json to_json(const LatencyStats & stats);
nlohmann::json to_json(const TimingSummary & summary);

/// Per threshold: median/min/max projected distance, collisions and
/// out-of-risk triggers.
nlohmann::json to_json(const SweepResult & sweep);

/// "threshold,run,projected_distance_m", one row per (threshold, run).
void write_sweep_csv(std::ostream & out, const SweepResult & sweep);

/// "hop,n,min_s,median_s,p95_s,max_s".
void write_timing_csv(std::ostream & out, const TimingSummary & timing);

/// Line chart of OOD score against distance to the obstacle at capture,
/// one polyline per run, with the decision threshold.
std::string score_distance_svg(std::span<const sim::RunLog> logs);

/// Box summary (min, quartiles, max) of projected stopping distance per
/// threshold.
std::string sweep_box_svg(const SweepResult & sweep);

}  // namespace oodsim::analysis
