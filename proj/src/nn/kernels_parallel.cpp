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
#include <variant>

#include "oodsim/nn/kernels.hpp"

namespace oodsim::nn
{
namespace parallel
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
  const long stride = layer.stride;
  const long pad = layer.padding;
  const float * k = layer.kernels.data().data();
  const float * x = input.data().data();
  const float * bias = layer.bias.data().data();
  float * y = out.data().data();

#pragma omp parallel for collapse(2) schedule(static)
  for (long oc = 0; oc < oc_n; ++oc) {
    for (long oy = 0; oy < oh; ++oy) {
      const long iy0 = oy * stride - pad;
      const long ky_lo = std::max(0L, -iy0);
      const long ky_hi = std::min(kh, ih - iy0);
      float * row = y + (oc * oh + oy) * ow;
      for (long ox = 0; ox < ow; ++ox) {
        const long ix0 = ox * stride - pad;
        const long kx_lo = std::max(0L, -ix0);
        const long kx_hi = std::min(kw, iw - ix0);
        float acc = bias[oc];
        for (long ic = 0; ic < in_c; ++ic) {
          const float * kc = k + (oc * in_c + ic) * kh * kw;
          const float * xc = x + ic * ih * iw;
          for (long ky = ky_lo; ky < ky_hi; ++ky) {
            const float * kr = kc + ky * kw;
            const float * xr = xc + (iy0 + ky) * iw + ix0;
            for (long kx = kx_lo; kx < kx_hi; ++kx) {
              acc += kr[kx] * xr[kx];
            }
          }
        }
        row[ox] = acc;
      }
    }
  }
  return out;
}

Tensor batchnorm(const Tensor & input, const BatchNorm & layer)
{
  detail::check_batchnorm(input, layer);
  Tensor out(input.shape());
  const long channels = static_cast<long>(input.dim(0));
  const long inner = static_cast<long>(detail::batchnorm_inner(input));
#pragma omp parallel for schedule(static)
  for (long c = 0; c < channels; ++c) {
    const float g = layer.gamma[c];
    const float b = layer.beta[c];
    const float m = layer.running_mean[c];
    const float denom = std::sqrt(layer.running_var[c] + layer.eps);
    for (long i = 0; i < inner; ++i) {
      const long idx = c * inner + i;
      out[idx] = g * (input[idx] - m) / denom + b;
    }
  }
  return out;
}

Tensor elu(const Tensor & input, float alpha)
{
  detail::check_elu(alpha);
  Tensor out(input.shape());
  const long n = static_cast<long>(input.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    const float v = input[i];
    out[i] = v > 0.0f ? v : alpha * std::expm1(v);
  }
  return out;
}

Tensor maxpool2x2(const Tensor & input)
{
  Tensor out(detail::check_maxpool2x2(input));
  const long channels = static_cast<long>(out.dim(0));
  const long oh = static_cast<long>(out.dim(1));
  const long ow = static_cast<long>(out.dim(2));
  const long w = static_cast<long>(input.dim(2));
  const long h = static_cast<long>(input.dim(1));
#pragma omp parallel for collapse(2) schedule(static)
  for (long c = 0; c < channels; ++c) {
    for (long y = 0; y < oh; ++y) {
      const float * top = input.data().data() + (c * h + 2 * y) * w;
      const float * bottom = top + w;
      float * dst = out.data().data() + (c * oh + y) * ow;
      for (long x = 0; x < ow; ++x) {
        dst[x] = std::max(std::max(top[2 * x], top[2 * x + 1]), std::max(bottom[2 * x], bottom[2 * x + 1]));
      }
    }
  }
  return out;
}

Tensor dense(const Tensor & input, const Dense & layer)
{
  Tensor out(detail::check_dense(input, layer));
  const long n_out = static_cast<long>(out.size());
  const long n_in = static_cast<long>(input.size());
  const float * w = layer.weights.data().data();
  const float * x = input.data().data();
#pragma omp parallel for schedule(static)
  for (long o = 0; o < n_out; ++o) {
    const float * row = w + o * n_in;
    float acc = layer.bias[o];
    for (long i = 0; i < n_in; ++i) {
      acc += row[i] * x[i];
    }
    out[o] = acc;
  }
  return out;
}

}  // namespace parallel

Tensor apply(const Layer & layer, const Tensor & input)
{
  switch (tag_of(layer)) {
    case LayerTag::kConv2D:
      return conv2d(input, std::get<Conv2D>(layer));
    case LayerTag::kBatchNorm:
      return batchnorm(input, std::get<BatchNorm>(layer));
    case LayerTag::kElu:
      return elu(input, std::get<Elu>(layer).alpha);
    case LayerTag::kMaxPool2x2:
      return maxpool2x2(input);
    case LayerTag::kFlatten:
      return input.reshaped({input.size()});
    case LayerTag::kDense:
      break;
  }
  return dense(input, std::get<Dense>(layer));
}

}  // namespace oodsim::nn
