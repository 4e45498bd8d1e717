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
#include <memory>

#include "oodsim/core/time.hpp"
#include "oodsim/vision/image.hpp"

namespace oodsim
{

/// Ground truth attached by the renderer. Scorers other than the oracle
/// must not look at it.
struct SceneTruth
{
  double vehicle_x_m = 0.0;
  double illumination = 1.0;
  bool obstacle_present = false;
  /// Fraction of the detector view (lower half of the frame) covered by the
  /// obstacle.
  double obstacle_view_fraction = 0.0;
  /// Oracle gain of the obstacle variant in this scene.
  double obstacle_gain = 0.0;
};

/// One camera capture. The image is shared because several subscribers
/// receive the same frame.
struct Frame
{
  std::uint64_t seq = 0;
  Timestamp capture_ts{0};
  std::shared_ptr<const vision::Image> image;
  SceneTruth truth;
};

}  // namespace oodsim
