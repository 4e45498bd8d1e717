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

#include <cstdint>
#include <vector>

#include "oodsim/nn/model.hpp"

namespace oodsim::nn
{

/// Layer-stack recipe for a conv encoder: each conv block is
/// Conv2D -> BatchNorm -> ELU, optionally followed by a 2x2 max-pool, then
/// Flatten -> [Dense(hidden) -> ELU] -> Dense(2*D).
struct EncoderSpec
{
  Tensor::Shape input_shape{3, 48, 128};
  std::vector<std::size_t> conv_channels{32, 64, 128, 128};
  /// Indices of conv blocks followed by a max-pool.
  std::vector<std::size_t> pool_after{1, 3};
  std::size_t kernel = 5;
  int padding = 2;
  std::size_t hidden = 1568;
  std::size_t latent_dim = kDefaultLatentDim;
};

/// Deterministically initialised encoder (scaled uniform weights, mildly
/// perturbed batchnorm statistics). Used for tests, benchmarks and as a
/// stand-in when no trained weight file is available.
Model make_encoder(const EncoderSpec & spec, std::uint64_t seed);

}  // namespace oodsim::nn
