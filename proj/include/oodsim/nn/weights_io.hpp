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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "oodsim/nn/model.hpp"

// Binary weight file, little-endian throughout:
//
//   "OODW" | u32 version (=1) | u32 layer_count
//   per layer: u8 tag, then each parameter array of that layer type as
//              u32 rank | u32 dims[rank] | f32 values[product(dims)]
//
// Parameter arrays per tag, in order:
//   0 Conv2D     kernels[out,in,kh,kw], bias[out], hyper[2] = {stride, padding}
//   1 BatchNorm  gamma[c], beta[c], running_mean[c], running_var[c], eps[1]
//   2 ELU        alpha[1]
//   3 MaxPool2x2 (none)
//   4 Flatten    (none)
//   5 Dense      weights[out,in], bias[out]
//
// The sidecar manifest "<file>.manifest" holds key=value lines with at
// least input_shape=C,H,W and latent_dim=D.

namespace oodsim::nn
{

inline constexpr std::uint32_t kWeightFormatVersion = 1;

struct WeightManifest
{
  Tensor::Shape input_shape;
  std::size_t latent_dim = kDefaultLatentDim;
};

/// Encodes the layer stack (header included) into the binary format.
std::vector<std::uint8_t> serialize_layers(const std::vector<Layer> & layers);

/// Decodes a binary layer stack. Throws FormatError on bad magic, version,
/// tag or truncation and ShapeError on parameter arrays that disagree.
std::vector<Layer> parse_layers(std::span<const std::uint8_t> bytes);

std::string format_manifest(const WeightManifest & manifest);
WeightManifest parse_manifest(const std::string & text);

std::filesystem::path manifest_path(const std::filesystem::path & weights);

/// Reads the weight file and its sidecar manifest and builds a validated
/// Model.
Model load_weights(const std::filesystem::path & path);

/// Writes the weight file and sidecar manifest.
void save_weights(const Model & model, const std::filesystem::path & path);

}  // namespace oodsim::nn
