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

#include "oodsim/nn/model.hpp"

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/nn/kernels.hpp"

namespace oodsim::nn
{
namespace
{

std::size_t params_of(const Layer & layer)
{
  if (const auto * c = std::get_if<Conv2D>(&layer)) {
    return c->kernels.size() + c->bias.size();
  }
  if (const auto * b = std::get_if<BatchNorm>(&layer)) {
    return b->gamma.size() * 4;
  }
  if (const auto * d = std::get_if<Dense>(&layer)) {
    return d->weights.size() + d->bias.size();
  }
  return 0;
}

}  // namespace

Model::Model(Tensor::Shape input_shape, std::size_t latent_dim, std::vector<Layer> layers)
: input_shape_(std::move(input_shape)), latent_dim_(latent_dim), layers_(std::move(layers))
{
  if (latent_dim_ == 0) {
    throw ValidationError("latent dimension must be at least 1");
  }
  if (element_count(input_shape_) == 0) {
    throw ShapeError(fmt::format("model input shape {} is empty", to_string(input_shape_)));
  }
  Tensor::Shape shape = input_shape_;
  shapes_.reserve(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      shape = output_shape(layers_[i], shape);
    } catch (const ShapeError & e) {
      throw ShapeError(fmt::format("layer {} ({}): {}", i, name_of(layers_[i]), e.what()));
    }
    shapes_.push_back(shape);
  }
  if (shape.size() != 1 || shape[0] != 2 * latent_dim_) {
    throw ShapeError(fmt::format(
      "model must end in a flat vector of 2*D = {} values, final shape is {}", 2 * latent_dim_,
      to_string(shape)));
  }
}

std::size_t Model::parameter_count() const
{
  std::size_t n = 0;
  for (const auto & l : layers_) {
    n += params_of(l);
  }
  return n;
}

LatentStats encode(const Model & model, const Tensor & image)
{
  if (image.shape() != model.input_shape()) {
    throw ShapeError(fmt::format(
      "encoder expects input {}, got {}", to_string(model.input_shape()), to_string(image.shape())));
  }
  if (!image.all_finite()) {
    throw NumericError("encoder input contains non-finite values");
  }
  Tensor act = image;
  const auto & layers = model.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    act = nn::apply(layers[i], act);
    if (const std::size_t bad = act.first_non_finite(); bad != act.size()) {
      throw NumericError(fmt::format(
        "layer {} ({}) produced a non-finite activation at element {}", i, name_of(layers[i]), bad));
    }
  }
  const std::size_t d = model.latent_dim();
  LatentStats stats;
  stats.mu.assign(act.data().begin(), act.data().begin() + static_cast<long>(d));
  stats.logvar.assign(act.data().begin() + static_cast<long>(d), act.data().end());
  return stats;
}

}  // namespace oodsim::nn
