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
#include <span>
#include <string>
#include <vector>

namespace oodsim::nn
{

/// Shape-tagged row-major float32 array. Images are stored channel-major
/// (C, H, W).
class Tensor
{
public:
  using Shape = std::vector<std::size_t>;

  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);

  /// Throws ShapeError when product(shape) != data.size().
  Tensor(Shape shape, std::vector<float> data);

  const Shape & shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  const std::vector<float> & values() const { return data_; }

  float & operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  /// (c, y, x) accessor for rank-3 tensors.
  float & at(std::size_t c, std::size_t y, std::size_t x)
  {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }
  float at(std::size_t c, std::size_t y, std::size_t x) const
  {
    return data_[(c * shape_[1] + y) * shape_[2] + x];
  }

  /// Same data, new shape of equal element count.
  Tensor reshaped(Shape shape) const;

  /// Index of the first non-finite element, or size() when all are finite.
  std::size_t first_non_finite() const;
  bool all_finite() const { return first_non_finite() == size(); }

  friend bool operator==(const Tensor &, const Tensor &) = default;

private:
  Shape shape_;
  std::vector<float> data_;
};

std::size_t element_count(const Tensor::Shape & shape);
std::string to_string(const Tensor::Shape & shape);

}  // namespace oodsim::nn
