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
#include <string_view>
#include <variant>
#include <vector>

#include "oodsim/nn/tensor.hpp"

namespace oodsim::nn
{

/// 2-D cross-correlation (no kernel flip). kernels is [out, in, kh, kw],
/// bias is [out].
struct Conv2D
{
  Tensor kernels;
  Tensor bias;
  int stride = 1;
  int padding = 2;
};

/// Inference-mode batch normalization over channel 0 of a (C, H, W) tensor,
/// or over every element of a rank-1 tensor.
struct BatchNorm
{
  Tensor gamma;
  Tensor beta;
  Tensor running_mean;
  Tensor running_var;
  float eps = 1e-5f;
};

struct Elu
{
  float alpha = 1.0f;
};

struct MaxPool2x2
{
};

struct Flatten
{
};

/// weights is [out, in], bias is [out]. Input must be rank 1.
struct Dense
{
  Tensor weights;
  Tensor bias;
};

using Layer = std::variant<Conv2D, BatchNorm, Elu, MaxPool2x2, Flatten, Dense>;

/// Type tags of the weight file, in variant order.
enum class LayerTag : std::uint8_t {
  kConv2D = 0,
  kBatchNorm = 1,
  kElu = 2,
  kMaxPool2x2 = 3,
  kFlatten = 4,
  kDense = 5,
};

LayerTag tag_of(const Layer & layer);
std::string_view name_of(const Layer & layer);

/// Output shape of `layer` applied to `input`. Throws ShapeError or
/// ValidationError when the layer cannot accept the input.
Tensor::Shape output_shape(const Layer & layer, const Tensor::Shape & input);

}  // namespace oodsim::nn
