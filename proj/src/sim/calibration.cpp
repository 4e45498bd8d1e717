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

#include "oodsim/sim/calibration.hpp"

#include <fstream>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "oodsim/core/error.hpp"
#include "oodsim/nn/weights_io.hpp"
#include "oodsim/sim/oracle.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace oodsim::sim
{
namespace
{

// Separates the calibration stream from run noise drawn from the same seed.
constexpr std::uint64_t kCalibrationStream = 0xC411B7A7E0000000ULL;
constexpr double kIlluminationSpread = 0.1;

void warn_if_tiny(std::size_t n)
{
  if (n == 1) {
    spdlog::warn("calibration set has a single frame; its score becomes the threshold");
  }
}

}  // namespace

std::vector<Scene> calibration_scenes(const ScenarioConfig & config, std::size_t count)
{
  std::mt19937_64 rng(config.seed ^ kCalibrationStream);
  std::uniform_real_distribution<double> illum(1.0 - kIlluminationSpread, 1.0 + kIlluminationSpread);
  std::vector<Scene> scenes(count);
  for (std::size_t i = 0; i < count; ++i) {
    scenes[i].obstacle.reset();
    scenes[i].illumination = illum(rng);
    scenes[i].noise_seed = config.seed ^ kCalibrationStream;
    scenes[i].frame_seq = i;
  }
  return scenes;
}

Calibration calibrate_oracle(const ScenarioConfig & config)
{
  const auto scenes = calibration_scenes(config, config.calibration_frames);
  if (scenes.empty()) {
    throw ValidationError("calibration set is empty");
  }
  warn_if_tiny(scenes.size());
  Calibration cal;
  cal.scorer = ScorerKind::kOracle;
  cal.quantile = config.quantile;
  cal.scores.reserve(scenes.size());
  for (const Scene & s : scenes) {
    cal.scores.push_back(oracle_score(config.oracle, scene_truth(s)));
  }
  cal.detector.subset.clear();
  cal.detector.threshold = ood::calibrate_threshold(cal.scores, config.quantile);
  return cal;
}

ood::KlMatrix calibration_kl(const ScenarioConfig & config, const nn::Model & model)
{
  const auto scenes = calibration_scenes(config, config.calibration_frames);
  if (scenes.empty()) {
    throw ValidationError("calibration set is empty");
  }
  warn_if_tiny(scenes.size());
  ood::KlMatrix kl;
  for (const Scene & s : scenes) {
    const nn::Tensor input = vision::to_tensor(vision::detector_view(render(s)));
    kl.append(ood::kl_per_dim(nn::encode(model, input)));
  }
  return kl;
}

Calibration calibrate_vae(const ScenarioConfig & config, const nn::Model & model, std::size_t k)
{
  const ood::KlMatrix kl = calibration_kl(config, model);
  Calibration cal;
  cal.scorer = ScorerKind::kVae;
  cal.quantile = config.quantile;
  cal.detector.latent_dim = model.latent_dim();
  cal.detector.subset = ood::select_detectors(kl, k);
  cal.scores.reserve(kl.rows);
  for (std::size_t r = 0; r < kl.rows; ++r) {
    cal.scores.push_back(ood::ood_score(
      std::span<const double>(kl.values.data() + r * kl.cols, kl.cols), cal.detector.subset));
  }
  cal.detector.threshold = ood::calibrate_threshold(cal.scores, config.quantile);
  return cal;
}

std::shared_ptr<const nn::Model> load_model(const ScenarioConfig & config)
{
  if (config.weights.empty()) {
    throw ValidationError("the vae scorer needs a weight file (--weights)");
  }
  return std::make_shared<const nn::Model>(nn::load_weights(config.weights));
}

Calibration calibrate(const ScenarioConfig & config, const std::shared_ptr<const nn::Model> & model)
{
  if (config.scorer == ScorerKind::kOracle) {
    return calibrate_oracle(config);
  }
  if (!model) {
    throw ValidationError("the vae scorer needs a loaded model");
  }
  return calibrate_vae(config, *model);
}

std::shared_ptr<const ood::Scorer> make_scorer(
  const ScenarioConfig & config, const Calibration & calibration, std::shared_ptr<const nn::Model> model)
{
  const double threshold = config.threshold.value_or(calibration.detector.threshold);
  if (config.scorer == ScorerKind::kOracle) {
    return std::make_shared<OracleScorer>(config.oracle, threshold);
  }
  if (!model) {
    throw ValidationError("the vae scorer needs a loaded model");
  }
  ood::DetectorConfig det = calibration.detector;
  det.threshold = threshold;
  return std::make_shared<ood::VaeScorer>(std::move(model), det);
}

nlohmann::json to_json(const Calibration & c)
{
  nlohmann::json j;
  j["scorer"] = to_string(c.scorer);
  j["quantile"] = c.quantile;
  j["frames"] = c.scores.size();
  j["threshold"] = c.detector.threshold;
  j["subset"] = c.detector.subset;
  j["latent_dim"] = c.detector.latent_dim;
  j["scores"] = c.scores;
  return j;
}

Calibration calibration_from_json(const nlohmann::json & j)
{
  try {
    Calibration c;
    c.scorer = parse_scorer(j.at("scorer").get<std::string>());
    c.quantile = j.at("quantile").get<double>();
    c.detector.threshold = j.at("threshold").get<double>();
    c.detector.subset = j.at("subset").get<std::vector<std::size_t>>();
    c.detector.latent_dim = j.at("latent_dim").get<std::size_t>();
    c.scores = j.at("scores").get<std::vector<double>>();
    if (c.scorer == ScorerKind::kVae) {
      c.detector.validate();
    }
    return c;
  } catch (const nlohmann::json::exception & e) {
    throw FormatError(fmt::format("malformed calibration record: {}", e.what()));
  }
}

void save_calibration(const std::filesystem::path & path, const Calibration & calibration)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  out << to_json(calibration).dump(2) << '\n';
}

Calibration load_calibration(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ValidationError(fmt::format("cannot open '{}'", path.string()));
  }
  try {
    return calibration_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error & e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace oodsim::sim
