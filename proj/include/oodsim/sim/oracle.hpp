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

#include "oodsim/ood/scorer.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/render.hpp"

namespace oodsim::sim
{

/// s_base + gain * view_fraction + s_jitter * |illumination - 1|.
double oracle_score(const OracleParams & params, const SceneTruth & truth);

/// Score of the scenario's scene at a vehicle position.
double oracle_score(const ScenarioConfig & config, double vehicle_x);

/// Deterministic scorer reading the renderer's ground truth. Lets the
/// closed loop run without trained weights.
class OracleScorer final : public ood::Scorer
{
public:
  OracleScorer(OracleParams params, double threshold);

  ood::ScoreOutput evaluate(const Frame & frame) const override;
  double threshold() const override { return threshold_; }
  std::string_view name() const override { return "oracle"; }

  const OracleParams & params() const { return params_; }

private:
  OracleParams params_;
  double threshold_;
};

}  // namespace oodsim::sim
