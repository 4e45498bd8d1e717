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
#include <optional>

#include "oodsim/core/frame.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/vision/image.hpp"

namespace oodsim::sim
{

/// Forward-looking pinhole camera over a flat road. A ground point at
/// forward distance z and lateral offset X projects to
/// column cx + f*X/z and row horizon + f*(mount - Y)/z.
struct CameraModel
{
  int width = 640;
  int height = 480;
  double focal_px = 300.0;
  double mount_height_m = 0.1;
  double horizon_row = 190.0;
  double cx = 320.0;
};

inline constexpr CameraModel kCamera{};
inline constexpr double kLaneOffsetM = 0.1;
inline constexpr double kLaneLineWidthM = 0.01;
inline constexpr std::uint8_t kRoadLevel = 40;
inline constexpr std::uint8_t kLaneLevel = 240;
inline constexpr std::uint8_t kBackgroundLevel = 110;
/// Per-channel noise is uniform on [-kNoiseAmplitude, kNoiseAmplitude].
inline constexpr int kNoiseAmplitude = 6;
/// First camera row of the detector and lane view (the lower half).
inline constexpr int kViewTopRow = 240;

/// Everything that determines one rendered frame.
struct Scene
{
  std::optional<ObstacleKind> obstacle;
  /// Camera-to-obstacle distance (m); ignored without an obstacle.
  double distance_m = 1.0;
  double illumination = 1.0;
  std::uint64_t noise_seed = 0;
  std::uint64_t frame_seq = 0;
};

/// Half-open pixel box [x0, x1) x [y0, y1); empty when x0 >= x1 or y0 >= y1.
struct PixelBox
{
  int x0 = 0;
  int x1 = 0;
  int y0 = 0;
  int y1 = 0;

  bool empty() const { return x0 >= x1 || y0 >= y1; }
  std::int64_t area() const { return empty() ? 0 : std::int64_t{x1 - x0} * (y1 - y0); }
};

/// Pixels touched by the obstacle's projected rectangle, clipped to the
/// frame. Raises ValidationError unless distance > 0.
PixelBox obstacle_box(ObstacleKind kind, double distance_m);

/// Obstacle pixels in the lower half divided by the lower-half area.
double view_fraction(const PixelBox & box);

/// Scene of a scenario at a vehicle position. Raises ValidationError when
/// an obstacle is configured and vehicle_x >= d_obs.
Scene make_scene(const ScenarioConfig & config, double vehicle_x, std::uint64_t frame_seq);

SceneTruth scene_truth(const Scene & scene, double vehicle_x = 0.0);

/// 640x480 RGB frame.
vision::Image render(const Scene & scene);

/// 640x480 single-channel mask, 255 on obstacle pixels.
vision::Image obstacle_mask(const Scene & scene);

/// render(make_scene(config, vehicle_x, frame_seq)).
vision::Image render_frame(const ScenarioConfig & config, double vehicle_x, std::uint64_t frame_seq = 0);

/// Rendered frame with ground truth attached.
Frame capture_frame(const ScenarioConfig & config, double vehicle_x, std::uint64_t seq, Timestamp capture_ts);

/// Frame of an arbitrary scene (used for calibration and datasets).
Frame capture_scene(const Scene & scene, std::uint64_t seq, Timestamp capture_ts, double vehicle_x = 0.0);

namespace reference
{
/// Pixel-by-pixel serial renderer with the same output as render().
vision::Image render(const Scene & scene);
}  // namespace reference

}  // namespace oodsim::sim
