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
#include <vector>

#include "oodsim/vision/image.hpp"

namespace oodsim::vision
{

struct CannyParams
{
  double low = 50.0;
  double high = 150.0;
};

/// Intermediate products, exposed for debug dumps and stage-level tests.
struct CannyStages
{
  int width = 0;
  int height = 0;
  std::vector<float> blurred;
  std::vector<float> gx;
  std::vector<float> gy;
  std::vector<float> magnitude;
  /// Magnitude after non-maximum suppression (0 where suppressed).
  std::vector<float> thin;
  Image edges;
};

/// 5x5 Gaussian (sigma 1.4) -> 3x3 Sobel -> 4-direction non-maximum
/// suppression -> hysteresis (strong >= high, weak >= low, 8-connected).
/// Borders are replicated for filtering; the outermost pixel ring never
/// carries an edge. Output is 0/255.
Image canny(const Image & gray, const CannyParams & params = {});
CannyStages canny_stages(const Image & gray, const CannyParams & params = {});

namespace reference
{
CannyStages canny_stages(const Image & gray, const CannyParams & params = {});
Image canny(const Image & gray, const CannyParams & params = {});
}  // namespace reference

/// Normalised 5x5 Gaussian taps (row-major).
const std::vector<float> & gaussian5x5();

}  // namespace oodsim::vision
