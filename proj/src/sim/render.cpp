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

#include "oodsim/sim/render.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::sim
{
namespace
{

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t frame_key(const Scene & s)
{
  return splitmix64(s.noise_seed ^ splitmix64(s.frame_seq));
}

std::uint8_t shade(std::uint8_t base, double illumination, std::uint64_t hash, int channel)
{
  constexpr int kSpan = 2 * kNoiseAmplitude + 1;
  const int noise = static_cast<int>(((hash >> (16 * channel)) & 0xFFFFU) % kSpan) - kNoiseAmplitude;
  const long lit = std::lround(base * illumination) + noise;
  return static_cast<std::uint8_t>(std::clamp<long>(lit, 0, 255));
}

/// Lane paint centre offset and half width (px) on row y, or nothing above
/// the horizon.
struct LaneRow
{
  bool road = false;
  double offset = 0.0;
  double half_width = 0.0;
};

LaneRow lane_row(int y)
{
  const double below = y + 0.5 - kCamera.horizon_row;
  if (below <= 0.0) {
    return {};
  }
  // f * X / z with z = f * mount / below.
  const double scale = below / kCamera.mount_height_m;
  return {true, kLaneOffsetM * scale, 0.5 * kLaneLineWidthM * scale};
}

bool on_lane(const LaneRow & row, int x)
{
  const double px = x + 0.5;
  return std::abs(px - (kCamera.cx - row.offset)) <= row.half_width ||
         std::abs(px - (kCamera.cx + row.offset)) <= row.half_width;
}

bool in_box(const PixelBox & b, int x, int y)
{
  return x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
}

Rgb base_color(const Scene & scene, const PixelBox & box, const LaneRow & row, int x, int y)
{
  if (scene.obstacle && in_box(box, x, y)) {
    return obstacle_spec(*scene.obstacle).color;
  }
  if (!row.road) {
    return {kBackgroundLevel, kBackgroundLevel, kBackgroundLevel};
  }
  const std::uint8_t v = on_lane(row, x) ? kLaneLevel : kRoadLevel;
  return {v, v, v};
}

void put(vision::Image & img, int x, int y, Rgb c, double illumination, std::uint64_t hash)
{
  img.at(x, y, 0) = shade(c.r, illumination, hash, 0);
  img.at(x, y, 1) = shade(c.g, illumination, hash, 1);
  img.at(x, y, 2) = shade(c.b, illumination, hash, 2);
}

PixelBox scene_box(const Scene & scene)
{
  return scene.obstacle ? obstacle_box(*scene.obstacle, scene.distance_m) : PixelBox{};
}

void check_scene(const Scene & scene)
{
  if (!(scene.illumination > 0.0) || !std::isfinite(scene.illumination)) {
    throw ValidationError(fmt::format("illumination must be > 0, got {}", scene.illumination));
  }
}

}  // namespace

PixelBox obstacle_box(ObstacleKind kind, double distance_m)
{
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw ValidationError(fmt::format("obstacle distance must be > 0, got {} m", distance_m));
  }
  const ObstacleSpec & spec = obstacle_spec(kind);
  const double f = kCamera.focal_px / distance_m;
  const double left = kCamera.cx - f * 0.5 * spec.width_m;
  const double right = kCamera.cx + f * 0.5 * spec.width_m;
  const double top = kCamera.horizon_row + f * (kCamera.mount_height_m - spec.height_m);
  const double bottom = kCamera.horizon_row + f * kCamera.mount_height_m;
  auto clip = [](double v, int hi) { return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi))); };
  return {
    clip(std::floor(left), kCamera.width), clip(std::ceil(right), kCamera.width), clip(std::floor(top), kCamera.height),
    clip(std::ceil(bottom), kCamera.height)};
}

double view_fraction(const PixelBox & box)
{
  PixelBox lower = box;
  lower.y0 = std::max(lower.y0, kViewTopRow);
  const double total = static_cast<double>(kCamera.width) * (kCamera.height - kViewTopRow);
  return static_cast<double>(lower.area()) / total;
}

Scene make_scene(const ScenarioConfig & config, double vehicle_x, std::uint64_t frame_seq)
{
  Scene s;
  s.obstacle = config.obstacle;
  s.illumination = config.illumination;
  s.noise_seed = config.seed;
  s.frame_seq = frame_seq;
  if (config.obstacle) {
    if (!(vehicle_x < config.d_obs_m)) {
      throw ValidationError(fmt::format(
        "vehicle at x = {} m is at or past the obstacle at {} m", vehicle_x, config.d_obs_m));
    }
    s.distance_m = config.d_obs_m - vehicle_x;
  }
  return s;
}

SceneTruth scene_truth(const Scene & scene, double vehicle_x)
{
  SceneTruth t;
  t.vehicle_x_m = vehicle_x;
  t.illumination = scene.illumination;
  t.obstacle_present = scene.obstacle.has_value();
  if (scene.obstacle) {
    t.obstacle_view_fraction = view_fraction(obstacle_box(*scene.obstacle, scene.distance_m));
    t.obstacle_gain = obstacle_spec(*scene.obstacle).gain;
  }
  return t;
}

vision::Image render(const Scene & scene)
{
  check_scene(scene);
  const PixelBox box = scene_box(scene);
  const std::uint64_t key = frame_key(scene);
  vision::Image img(kCamera.width, kCamera.height, 3);
  const int w = kCamera.width;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < kCamera.height; ++y) {
    const LaneRow row = lane_row(y);
    for (int x = 0; x < w; ++x) {
      const auto idx = static_cast<std::uint64_t>(y) * w + x;
      put(img, x, y, base_color(scene, box, row, x, y), scene.illumination, splitmix64(key + idx));
    }
  }
  return img;
}

namespace reference
{

vision::Image render(const Scene & scene)
{
  check_scene(scene);
  const std::uint64_t key = frame_key(scene);
  vision::Image img(kCamera.width, kCamera.height, 3);
  for (int y = 0; y < kCamera.height; ++y) {
    for (int x = 0; x < kCamera.width; ++x) {
      const PixelBox box = scene_box(scene);
      const auto idx = static_cast<std::uint64_t>(y) * kCamera.width + x;
      put(img, x, y, base_color(scene, box, lane_row(y), x, y), scene.illumination, splitmix64(key + idx));
    }
  }
  return img;
}

}  // namespace reference

vision::Image obstacle_mask(const Scene & scene)
{
  vision::Image mask(kCamera.width, kCamera.height, 1);
  if (!scene.obstacle) {
    return mask;
  }
  const PixelBox box = scene_box(scene);
  for (int y = box.y0; y < box.y1; ++y) {
    for (int x = box.x0; x < box.x1; ++x) {
      mask.at(x, y) = 255;
    }
  }
  return mask;
}

vision::Image render_frame(const ScenarioConfig & config, double vehicle_x, std::uint64_t frame_seq)
{
  return render(make_scene(config, vehicle_x, frame_seq));
}

Frame capture_scene(const Scene & scene, std::uint64_t seq, Timestamp capture_ts, double vehicle_x)
{
  Frame f;
  f.seq = seq;
  f.capture_ts = capture_ts;
  f.image = std::make_shared<const vision::Image>(render(scene));
  f.truth = scene_truth(scene, vehicle_x);
  return f;
}

Frame capture_frame(const ScenarioConfig & config, double vehicle_x, std::uint64_t seq, Timestamp capture_ts)
{
  return capture_scene(make_scene(config, vehicle_x, seq), seq, capture_ts, vehicle_x);
}

}  // namespace oodsim::sim
