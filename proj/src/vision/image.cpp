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

#include "oodsim/vision/image.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::vision
{

Image::Image(int width, int height, int channels, std::uint8_t fill)
: width_(width), height_(height), channels_(channels)
{
  if (width < 0 || height < 0 || (channels != 1 && channels != 3)) {
    throw ShapeError(fmt::format("invalid image geometry {}x{}x{}", width, height, channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image::Image(int width, int height, int channels, std::vector<std::uint8_t> data)
: Image(width, height, channels)
{
  if (data.size() != data_.size()) {
    throw ShapeError(fmt::format(
      "image {}x{}x{} needs {} bytes, got {}", width, height, channels, data_.size(), data.size()));
  }
  data_ = std::move(data);
}

Image mirror_horizontal(const Image & img)
{
  Image out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        out.at(img.width() - 1 - x, y, c) = img.at(x, y, c);
      }
    }
  }
  return out;
}

std::size_t count_nonzero(const Image & img)
{
  std::size_t n = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      n += img.at(x, y) != 0;
    }
  }
  return n;
}

}  // namespace oodsim::vision
