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
#include <filesystem>
#include <memory>
#include <vector>

#include <nlohmann/json.hpp>

#include "oodsim/nn/model.hpp"
#include "oodsim/ood/detector.hpp"
#include "oodsim/ood/scorer.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/render.hpp"

namespace oodsim::sim
{

/// In-distribution calibration scenes: empty lane, illumination uniform on
/// [0.9, 1.1], distinct noise per frame. Deterministic in config.seed.
std::vector<Scene> calibration_scenes(const ScenarioConfig & config, std::size_t count);

struct Calibration
{
  ScorerKind scorer = ScorerKind::kOracle;
  double quantile = 0.8;
  /// Scores of the calibration frames in scene order.
  std::vector<double> scores;
  /// Subset is empty for the oracle scorer.
  ood::DetectorConfig detector;
};

/// Scores every calibration frame and sets the nearest-rank threshold.
Calibration calibrate_oracle(const ScenarioConfig & config);

/// KL vectors of the calibration frames under the model, one row per frame.
ood::KlMatrix calibration_kl(const ScenarioConfig & config, const nn::Model & model);

/// Selects the k highest-mean KL dimensions, then sets the threshold on the
/// subset score.
Calibration calibrate_vae(
  const ScenarioConfig & config, const nn::Model & model, std::size_t k = ood::kDefaultDetectorCount);

/// Loads the model for the vae scorer (weights from config).
std::shared_ptr<const nn::Model> load_model(const ScenarioConfig & config);

/// Calibrates with the configured scorer; `model` is required for vae.
Calibration calibrate(const ScenarioConfig & config, const std::shared_ptr<const nn::Model> & model);

/// Scorer for a run: config.threshold overrides the calibrated one.
std::shared_ptr<const ood::Scorer> make_scorer(
  const ScenarioConfig & config, const Calibration & calibration, std::shared_ptr<const nn::Model> model);

nlohmann::json to_json(const Calibration & calibration);
Calibration calibration_from_json(const nlohmann::json & j);
void save_calibration(const std::filesystem::path & path, const Calibration & calibration);
Calibration load_calibration(const std::filesystem::path & path);

}  // namespace oodsim::sim
