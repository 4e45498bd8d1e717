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

#include "oodsim/sim/oracle.hpp"

#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::sim
{

double oracle_score(const OracleParams & params, const SceneTruth & truth)
{
  return params.s_base + truth.obstacle_gain * truth.obstacle_view_fraction +
         params.s_jitter * std::abs(truth.illumination - 1.0);
}

double oracle_score(const ScenarioConfig & config, double vehicle_x)
{
  return oracle_score(config.oracle, scene_truth(make_scene(config, vehicle_x, 0), vehicle_x));
}

OracleScorer::OracleScorer(OracleParams params, double threshold) : params_(params), threshold_(threshold)
{
  if (!std::isfinite(threshold_)) {
    throw ValidationError(fmt::format("oracle threshold must be finite, got {}", threshold_));
  }
}

ood::ScoreOutput OracleScorer::evaluate(const Frame & frame) const
{
  return {{}, oracle_score(params_, frame.truth)};
}

}  // namespace oodsim::sim
