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

#include "oodsim/nn/layers.hpp"

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::nn
{
namespace
{

template <class... Ts>
struct Overloaded : Ts...
{
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_rank(const Tensor & t, std::size_t rank, std::string_view what)
{
  if (t.rank() != rank) {
    throw ShapeError(
      fmt::format("{} must have rank {}, got shape {}", what, rank, to_string(t.shape())));
  }
}

Tensor::Shape conv_output(const Conv2D & conv, const Tensor::Shape & in)
{
  require_rank(conv.kernels, 4, "conv2d kernels");
  require_rank(conv.bias, 1, "conv2d bias");
  if (in.size() != 3) {
    throw ShapeError(fmt::format("conv2d expects a (C, H, W) input, got {}", to_string(in)));
  }
  const auto & k = conv.kernels.shape();
  if (conv.bias.dim(0) != k[0]) {
    throw ShapeError(fmt::format("conv2d has {} kernels but {} biases", k[0], conv.bias.dim(0)));
  }
  if (k[1] != in[0]) {
    throw ShapeError(
      fmt::format("conv2d kernels expect {} input channels, input has {}", k[1], in[0]));
  }
  if (conv.stride < 1 || conv.padding < 0) {
    throw ValidationError(
      fmt::format("conv2d stride {} / padding {} invalid", conv.stride, conv.padding));
  }
  const auto out_dim = [&](std::size_t n, std::size_t kk) -> long {
    const long span = static_cast<long>(n) + 2L * conv.padding - static_cast<long>(kk);
    if (span < 0) {
      return 0;
    }
    return span / conv.stride + 1;
  };
  const long oh = out_dim(in[1], k[2]);
  const long ow = out_dim(in[2], k[3]);
  if (oh <= 0 || ow <= 0) {
    throw ShapeError(fmt::format(
      "conv2d with {}x{} kernel on {} yields a non-positive output size", k[2], k[3],
      to_string(in)));
  }
  return {k[0], static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
}

Tensor::Shape batchnorm_output(const BatchNorm & bn, const Tensor::Shape & in)
{
  if (in.empty()) {
    throw ShapeError("batchnorm on an empty shape");
  }
  const std::size_t channels = in[0];
  for (const Tensor * p : {&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var}) {
    require_rank(*p, 1, "batchnorm parameter");
    if (p->dim(0) != channels) {
      throw ShapeError(fmt::format(
        "batchnorm parameters have {} channels, input {} has {}", p->dim(0), to_string(in),
        channels));
    }
  }
  return in;
}

Tensor::Shape pool_output(const Tensor::Shape & in)
{
  if (in.size() != 3) {
    throw ShapeError(fmt::format("maxpool2x2 expects a (C, H, W) input, got {}", to_string(in)));
  }
  if (in[1] % 2 != 0 || in[2] % 2 != 0) {
    throw ShapeError(fmt::format("maxpool2x2 needs even spatial dimensions, got {}", to_string(in)));
  }
  return {in[0], in[1] / 2, in[2] / 2};
}

Tensor::Shape dense_output(const Dense & dense, const Tensor::Shape & in)
{
  require_rank(dense.weights, 2, "dense weights");
  require_rank(dense.bias, 1, "dense bias");
  if (in.size() != 1) {
    throw ShapeError(fmt::format("dense expects a flat input, got {}", to_string(in)));
  }
  if (dense.weights.dim(1) != in[0]) {
    throw ShapeError(
      fmt::format("dense expects {} inputs, got {}", dense.weights.dim(1), in[0]));
  }
  if (dense.bias.dim(0) != dense.weights.dim(0)) {
    throw ShapeError(fmt::format(
      "dense has {} outputs but {} biases", dense.weights.dim(0), dense.bias.dim(0)));
  }
  return {dense.weights.dim(0)};
}

}  // namespace

LayerTag tag_of(const Layer & layer)
{
  return static_cast<LayerTag>(layer.index());
}

std::string_view name_of(const Layer & layer)
{
  static constexpr std::string_view kNames[] = {"Conv2D",     "BatchNorm", "ELU",
                                                "MaxPool2x2", "Flatten",   "Dense"};
  return kNames[layer.index()];
}

Tensor::Shape output_shape(const Layer & layer, const Tensor::Shape & input)
{
  return std::visit(
    Overloaded{
      [&](const Conv2D & l) { return conv_output(l, input); },
      [&](const BatchNorm & l) { return batchnorm_output(l, input); },
      [&](const Elu & l) {
        if (!(l.alpha > 0.0f)) {
          throw ValidationError(fmt::format("ELU alpha must be positive, got {}", l.alpha));
        }
        return input;
      },
      [&](const MaxPool2x2 &) { return pool_output(input); },
      [&](const Flatten &) { return Tensor::Shape{element_count(input)}; },
      [&](const Dense & l) { return dense_output(l, input); },
    },
    layer);
}

}  // namespace oodsim::nn
