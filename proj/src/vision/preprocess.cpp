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

#include "oodsim/vision/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::vision
{
namespace
{

struct Tap
{
  int i0;
  int i1;
  double frac;
};

Tap source_tap(int dst, int dst_size, int src_size)
{
  const double scale = static_cast<double>(src_size) / dst_size;
  double s = (dst + 0.5) * scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_size - 1));
  const int i0 = static_cast<int>(std::floor(s));
  const int i1 = std::min(i0 + 1, src_size - 1);
  return {i0, i1, s - i0};
}

void require_camera_frame(const Image & frame)
{
  if (frame.width() != kCameraWidth || frame.height() != kCameraHeight || frame.channels() != 3) {
    throw ShapeError(fmt::format(
      "expected a {}x{} RGB frame, got {}x{}x{}", kCameraWidth, kCameraHeight, frame.width(),
      frame.height(), frame.channels()));
  }
}

}  // namespace

Image resize_bilinear(const Image & img, int width, int height)
{
  if (width <= 0 || height <= 0 || img.empty()) {
    throw ShapeError(fmt::format("cannot resize {}x{} to {}x{}", img.width(), img.height(), width, height));
  }
  Image out(width, height, img.channels());
  std::vector<Tap> xs(width);
  for (int x = 0; x < width; ++x) {
    xs[x] = source_tap(x, width, img.width());
  }
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    const Tap ty = source_tap(y, height, img.height());
    for (int x = 0; x < width; ++x) {
      const Tap & tx = xs[x];
      for (int c = 0; c < img.channels(); ++c) {
        const double top = img.at(tx.i0, ty.i0, c) * (1.0 - tx.frac) + img.at(tx.i1, ty.i0, c) * tx.frac;
        const double bot = img.at(tx.i0, ty.i1, c) * (1.0 - tx.frac) + img.at(tx.i1, ty.i1, c) * tx.frac;
        const double v = top * (1.0 - ty.frac) + bot * ty.frac;
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return out;
}

Image to_gray(const Image & img)
{
  if (img.channels() == 1) {
    return img;
  }
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double v = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

Image crop_rows(const Image & img, int y0, int rows)
{
  if (y0 < 0 || rows < 0 || y0 + rows > img.height()) {
    throw ShapeError(fmt::format("row crop [{}, {}) outside image of height {}", y0, y0 + rows, img.height()));
  }
  const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * img.channels();
  std::vector<std::uint8_t> data(
    img.data().begin() + static_cast<long>(y0 * row_bytes),
    img.data().begin() + static_cast<long>((y0 + rows) * row_bytes));
  return Image(img.width(), rows, img.channels(), std::move(data));
}

Image preprocess(const Image & frame)
{
  return to_gray(detector_view(frame));
}

Image detector_view(const Image & frame)
{
  require_camera_frame(frame);
  const Image small = resize_bilinear(frame, kResizedWidth, kResizedHeight);
  return crop_rows(small, kResizedHeight - kViewHeight, kViewHeight);
}

nn::Tensor to_tensor(const Image & img)
{
  const auto c_n = static_cast<std::size_t>(img.channels());
  const auto h = static_cast<std::size_t>(img.height());
  const auto w = static_cast<std::size_t>(img.width());
  nn::Tensor t({c_n, h, w});
  for (std::size_t c = 0; c < c_n; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        t.at(c, y, x) = static_cast<float>(img.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(c))) / 255.0f;
      }
    }
  }
  return t;
}

Image white_mask(const Image & gray, std::uint8_t lo)
{
  if (gray.channels() != 1) {
    throw ShapeError("white_mask expects a grayscale image");
  }
  Image out(gray.width(), gray.height(), 1);
  auto src = gray.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = src[i] >= lo ? 255 : 0;
  }
  return out;
}

}  // namespace oodsim::vision
