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

#include <cstdint>

#include "oodsim/nn/tensor.hpp"
#include "oodsim/vision/image.hpp"

namespace oodsim::vision
{

inline constexpr int kCameraWidth = 640;
inline constexpr int kCameraHeight = 480;
inline constexpr int kResizedWidth = 128;
inline constexpr int kResizedHeight = 96;
/// Rows of the resized frame kept for processing (the lower half).
inline constexpr int kViewHeight = kResizedHeight / 2;

/// Bilinear resampling with half-pixel centres and edge clamping; results
/// are rounded to the nearest integer.
Image resize_bilinear(const Image & img, int width, int height);

/// Rec.601 luma, rounded.
Image to_gray(const Image & img);

/// Rows [y0, y0 + rows).
Image crop_rows(const Image & img, int y0, int rows);

/// 640x480 RGB camera frame -> 128x48 grayscale lower-half view.
Image preprocess(const Image & frame);

/// 640x480 RGB camera frame -> 128x48 RGB lower-half view (detector input).
Image detector_view(const Image & frame);

/// (C, H, W) float tensor scaled to [0, 1].
nn::Tensor to_tensor(const Image & img);

/// 255 where pixel >= lo, else 0.
Image white_mask(const Image & gray, std::uint8_t lo);

}  // namespace oodsim::vision
