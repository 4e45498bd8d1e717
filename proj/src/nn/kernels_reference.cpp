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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/nn/kernels.hpp"

namespace oodsim::nn
{
namespace detail
{

Tensor::Shape check_conv2d(const Tensor & input, const Conv2D & layer)
{
  return output_shape(layer, input.shape());
}

Tensor::Shape check_batchnorm(const Tensor & input, const BatchNorm & layer)
{
  auto shape = output_shape(layer, input.shape());
  if (!(layer.eps >= 0.0f)) {
    throw ValidationError(fmt::format("batchnorm eps must be non-negative, got {}", layer.eps));
  }
  const auto var = layer.running_var.data();
  for (std::size_t c = 0; c < var.size(); ++c) {
    if (var[c] < 0.0f) {
      throw ValidationError(fmt::format("batchnorm running variance of channel {} is {}", c, var[c]));
    }
    if (!(var[c] + layer.eps > 0.0f)) {
      throw NumericError(fmt::format("batchnorm channel {} has zero variance and eps", c));
    }
  }
  return shape;
}

void check_elu(float alpha)
{
  if (!(alpha > 0.0f)) {
    throw ValidationError(fmt::format("ELU alpha must be positive, got {}", alpha));
  }
}

Tensor::Shape check_maxpool2x2(const Tensor & input)
{
  return output_shape(MaxPool2x2{}, input.shape());
}

Tensor::Shape check_dense(const Tensor & input, const Dense & layer)
{
  return output_shape(layer, input.shape());
}

std::size_t batchnorm_inner(const Tensor & input)
{
  return input.size() / input.dim(0);
}

}  // namespace detail

namespace reference
{

Tensor conv2d(const Tensor & input, const Conv2D & layer)
{
  Tensor out(detail::check_conv2d(input, layer));
  const auto & ks = layer.kernels.shape();
  const long in_c = static_cast<long>(ks[1]);
  const long kh = static_cast<long>(ks[2]);
  const long kw = static_cast<long>(ks[3]);
  const long ih = static_cast<long>(input.dim(1));
  const long iw = static_cast<long>(input.dim(2));
  const long oc_n = static_cast<long>(out.dim(0));
  const long oh = static_cast<long>(out.dim(1));
  const long ow = static_cast<long>(out.dim(2));
  const auto k = layer.kernels.data();
  const auto x = input.data();
  for (long oc = 0; oc < oc_n; ++oc) {
    for (long oy = 0; oy < oh; ++oy) {
      for (long ox = 0; ox < ow; ++ox) {
        float acc = layer.bias[oc];
        for (long ic = 0; ic < in_c; ++ic) {
          for (long ky = 0; ky < kh; ++ky) {
            const long iy = oy * layer.stride - layer.padding + ky;
            if (iy < 0 || iy >= ih) {
              continue;
            }
            for (long kx = 0; kx < kw; ++kx) {
              const long ix = ox * layer.stride - layer.padding + kx;
              if (ix < 0 || ix >= iw) {
                continue;
              }
              acc += k[((oc * in_c + ic) * kh + ky) * kw + kx] * x[(ic * ih + iy) * iw + ix];
            }
          }
        }
        out[(oc * oh + oy) * ow + ox] = acc;
      }
    }
  }
  return out;
}

Tensor batchnorm(const Tensor & input, const BatchNorm & layer)
{
  detail::check_batchnorm(input, layer);
  Tensor out(input.shape());
  const std::size_t channels = input.dim(0);
  const std::size_t inner = detail::batchnorm_inner(input);
  for (std::size_t c = 0; c < channels; ++c) {
    const float denom = std::sqrt(layer.running_var[c] + layer.eps);
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t idx = c * inner + i;
      out[idx] = layer.gamma[c] * (input[idx] - layer.running_mean[c]) / denom + layer.beta[c];
    }
  }
  return out;
}

Tensor elu(const Tensor & input, float alpha)
{
  detail::check_elu(alpha);
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const float v = input[i];
    out[i] = v > 0.0f ? v : alpha * std::expm1(v);
  }
  return out;
}

Tensor maxpool2x2(const Tensor & input)
{
  Tensor out(detail::check_maxpool2x2(input));
  const std::size_t w = input.dim(2);
  for (std::size_t c = 0; c < out.dim(0); ++c) {
    for (std::size_t y = 0; y < out.dim(1); ++y) {
      for (std::size_t x = 0; x < out.dim(2); ++x) {
        const std::size_t base = (c * input.dim(1) + 2 * y) * w + 2 * x;
        out.at(c, y, x) =
          std::max(std::max(input[base], input[base + 1]), std::max(input[base + w], input[base + w + 1]));
      }
    }
  }
  return out;
}

Tensor dense(const Tensor & input, const Dense & layer)
{
  Tensor out(detail::check_dense(input, layer));
  const std::size_t n_in = input.size();
  for (std::size_t o = 0; o < out.size(); ++o) {
    float acc = layer.bias[o];
    for (std::size_t i = 0; i < n_in; ++i) {
      acc += layer.weights[o * n_in + i] * input[i];
    }
    out[o] = acc;
  }
  return out;
}

}  // namespace reference
}  // namespace oodsim::nn
