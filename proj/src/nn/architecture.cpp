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

#include "oodsim/nn/architecture.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace oodsim::nn
{
namespace
{

Tensor uniform(Tensor::Shape shape, float bound, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<float> dist(-bound, bound);
  Tensor t(std::move(shape));
  for (auto & v : t.data()) {
    v = dist(rng);
  }
  return t;
}

Tensor filled(std::size_t n, float lo, float hi, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<float> dist(lo, hi);
  Tensor t({n});
  for (auto & v : t.data()) {
    v = dist(rng);
  }
  return t;
}

}  // namespace

Model make_encoder(const EncoderSpec & spec, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  std::size_t channels = spec.input_shape.at(0);
  for (std::size_t i = 0; i < spec.conv_channels.size(); ++i) {
    const std::size_t out = spec.conv_channels[i];
    const float fan_in = static_cast<float>(channels * spec.kernel * spec.kernel);
    Conv2D conv;
    conv.kernels = uniform({out, channels, spec.kernel, spec.kernel}, std::sqrt(3.0f / fan_in), rng);
    conv.bias = uniform({out}, 0.05f, rng);
    conv.stride = 1;
    conv.padding = spec.padding;
    layers.emplace_back(std::move(conv));

    BatchNorm bn;
    bn.gamma = filled(out, 0.8f, 1.2f, rng);
    bn.beta = filled(out, -0.1f, 0.1f, rng);
    bn.running_mean = filled(out, -0.1f, 0.1f, rng);
    bn.running_var = filled(out, 0.5f, 1.5f, rng);
    bn.eps = 1e-5f;
    layers.emplace_back(std::move(bn));
    layers.emplace_back(Elu{1.0f});

    if (std::find(spec.pool_after.begin(), spec.pool_after.end(), i) != spec.pool_after.end()) {
      layers.emplace_back(MaxPool2x2{});
    }
    channels = out;
  }
  layers.emplace_back(Flatten{});

  // Walk the shapes to find the flattened width.
  Tensor::Shape shape = spec.input_shape;
  for (const auto & l : layers) {
    shape = output_shape(l, shape);
  }
  std::size_t width = shape[0];

  const auto dense = [&](std::size_t out, std::size_t in) {
    Dense d;
    d.weights = uniform({out, in}, std::sqrt(3.0f / static_cast<float>(in)), rng);
    d.bias = uniform({out}, 0.05f, rng);
    return d;
  };
  if (spec.hidden > 0) {
    layers.emplace_back(dense(spec.hidden, width));
    layers.emplace_back(Elu{1.0f});
    width = spec.hidden;
  }
  layers.emplace_back(dense(2 * spec.latent_dim, width));
  return Model(spec.input_shape, spec.latent_dim, std::move(layers));
}

}  // namespace oodsim::nn
