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
#include <vector>

#include "oodsim/nn/layers.hpp"
#include "oodsim/nn/tensor.hpp"

namespace oodsim::nn
{

inline constexpr std::size_t kDefaultLatentDim = 30;

/// Diagonal-Gaussian posterior parameters emitted by the encoder.
struct LatentStats
{
  std::vector<float> mu;
  std::vector<float> logvar;

  std::size_t dim() const { return mu.size(); }
  friend bool operator==(const LatentStats &, const LatentStats &) = default;
};

/// Immutable encoder: an ordered layer stack whose shapes are validated on
/// construction, so encode() on a correctly shaped input never raises a
/// shape error.
class Model
{
public:
  Model(Tensor::Shape input_shape, std::size_t latent_dim, std::vector<Layer> layers);

  const Tensor::Shape & input_shape() const { return input_shape_; }
  std::size_t latent_dim() const { return latent_dim_; }
  const std::vector<Layer> & layers() const { return layers_; }
  /// Output shape after each layer.
  const std::vector<Tensor::Shape> & layer_shapes() const { return shapes_; }
  std::size_t parameter_count() const;

private:
  Tensor::Shape input_shape_;
  std::size_t latent_dim_;
  std::vector<Layer> layers_;
  std::vector<Tensor::Shape> shapes_;
};

/// Runs every layer in order and splits the final 2*D vector into
/// (mu, logvar). Throws ShapeError on a wrongly shaped image and
/// NumericError naming the first layer that produced NaN/Inf.
LatentStats encode(const Model & model, const Tensor & image);

}  // namespace oodsim::nn
