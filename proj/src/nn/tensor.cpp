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

#include "oodsim/nn/tensor.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "oodsim/core/error.hpp"

namespace oodsim::nn
{

std::size_t element_count(const Tensor::Shape & shape)
{
  if (shape.empty()) {
    return 0;
  }
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string to_string(const Tensor::Shape & shape)
{
  return fmt::format("[{}]", fmt::join(shape, "x"));
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(element_count(shape_), 0.0f) {}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data))
{
  if (element_count(shape_) != data_.size()) {
    throw ShapeError(fmt::format(
      "tensor shape {} holds {} values but {} were supplied", to_string(shape_),
      element_count(shape_), data_.size()));
  }
}

Tensor Tensor::reshaped(Shape shape) const
{
  return Tensor(std::move(shape), data_);
}

std::size_t Tensor::first_non_finite() const
{
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      return i;
    }
  }
  return data_.size();
}

}  // namespace oodsim::nn
