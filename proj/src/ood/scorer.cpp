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

#include "oodsim/ood/scorer.hpp"

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace oodsim::ood
{

VaeScorer::VaeScorer(std::shared_ptr<const nn::Model> model, DetectorConfig config)
: model_(std::move(model)), config_(std::move(config))
{
  if (!model_) {
    throw ValidationError("VAE scorer needs a model");
  }
  config_.validate();
  if (config_.latent_dim != model_->latent_dim()) {
    throw ValidationError(fmt::format(
      "detector config is for D = {} but the model has D = {}", config_.latent_dim, model_->latent_dim()));
  }
}

std::vector<double> VaeScorer::kl(const Frame & frame) const
{
  if (!frame.image) {
    throw ValidationError(fmt::format("frame {} carries no image", frame.seq));
  }
  const nn::Tensor input = vision::to_tensor(vision::detector_view(*frame.image));
  return kl_per_dim(nn::encode(*model_, input));
}

ScoreOutput VaeScorer::evaluate(const Frame & frame) const
{
  ScoreOutput out;
  out.kl = kl(frame);
  out.score = ood_score(out.kl, config_.subset);
  return out;
}

OODResult score_frame(const Scorer & scorer, const Frame & frame, const bus::Clock & clock)
{
  OODResult r;
  r.seq = frame.seq;
  r.ingest = clock.now();
  auto out = scorer.evaluate(frame);
  r.kl = std::move(out.kl);
  r.score = out.score;
  r.flagged = classify(r.score, scorer.threshold()) == Verdict::kOutOfDistribution;
  r.complete = clock.now();
  return r;
}

}  // namespace oodsim::ood
