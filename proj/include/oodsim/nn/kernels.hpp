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

#include "oodsim/nn/layers.hpp"
#include "oodsim/nn/tensor.hpp"

// Layer kernels come in two builds with identical per-element arithmetic:
// `reference` is plain serial loops and `parallel` distributes output
// elements over OpenMP threads. Both produce bit-identical results; the
// reference build is kept for tests and the benchmark.

namespace oodsim::nn
{

namespace reference
{
Tensor conv2d(const Tensor & input, const Conv2D & layer);
Tensor batchnorm(const Tensor & input, const BatchNorm & layer);
Tensor elu(const Tensor & input, float alpha);
Tensor maxpool2x2(const Tensor & input);
Tensor dense(const Tensor & input, const Dense & layer);
}  // namespace reference

namespace parallel
{
Tensor conv2d(const Tensor & input, const Conv2D & layer);
Tensor batchnorm(const Tensor & input, const BatchNorm & layer);
Tensor elu(const Tensor & input, float alpha);
Tensor maxpool2x2(const Tensor & input);
Tensor dense(const Tensor & input, const Dense & layer);
}  // namespace parallel

using parallel::batchnorm;
using parallel::conv2d;
using parallel::dense;
using parallel::elu;
using parallel::maxpool2x2;

/// Runs one layer with the parallel kernels.
Tensor apply(const Layer & layer, const Tensor & input);

namespace detail
{
// Shared argument checks; throw before any arithmetic happens.
Tensor::Shape check_conv2d(const Tensor & input, const Conv2D & layer);
Tensor::Shape check_batchnorm(const Tensor & input, const BatchNorm & layer);
void check_elu(float alpha);
Tensor::Shape check_maxpool2x2(const Tensor & input);
Tensor::Shape check_dense(const Tensor & input, const Dense & layer);
/// Elements per channel for batchnorm (H*W for images, 1 for vectors).
std::size_t batchnorm_inner(const Tensor & input);
}  // namespace detail

}  // namespace oodsim::nn
