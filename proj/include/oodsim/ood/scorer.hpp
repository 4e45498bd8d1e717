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

#include <memory>
#include <string_view>
#include <vector>

#include "oodsim/bus/clock.hpp"
#include "oodsim/core/frame.hpp"
#include "oodsim/nn/model.hpp"
#include "oodsim/ood/detector.hpp"

namespace oodsim::ood
{

struct ScoreOutput
{
  std::vector<double> kl;
  double score = 0.0;
};

/// Maps a frame to an OOD score. Implementations are immutable after
/// construction and safe to call from several threads.
class Scorer
{
public:
  virtual ~Scorer() = default;

  virtual ScoreOutput evaluate(const Frame & frame) const = 0;
  virtual double threshold() const = 0;
  virtual std::string_view name() const = 0;
};

/// Encoder + latent-KL detector on the 128x48 RGB lower-half view.
class VaeScorer final : public Scorer
{
public:
  VaeScorer(std::shared_ptr<const nn::Model> model, DetectorConfig config);

  ScoreOutput evaluate(const Frame & frame) const override;
  double threshold() const override { return config_.threshold; }
  std::string_view name() const override { return "vae"; }

  /// KL vector of a frame (full latent dimension).
  std::vector<double> kl(const Frame & frame) const;

  const nn::Model & model() const { return *model_; }
  const DetectorConfig & config() const { return config_; }

private:
  std::shared_ptr<const nn::Model> model_;
  DetectorConfig config_;
};

/// Scores a frame and stamps ingest/complete from the clock.
OODResult score_frame(const Scorer & scorer, const Frame & frame, const bus::Clock & clock);

}  // namespace oodsim::ood
