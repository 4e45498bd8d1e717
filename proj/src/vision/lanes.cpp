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

#include "oodsim/vision/lanes.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace oodsim::vision
{
namespace
{

struct WeightedSum
{
  double w = 0.0;
  double dx_dy = 0.0;
  double x_top = 0.0;

  void add(const LineSegment & s)
  {
    const double len = s.length();
    const double k = static_cast<double>(s.x2 - s.x1) / static_cast<double>(s.y2 - s.y1);
    w += len;
    dx_dy += len * k;
    x_top += len * (s.x1 - k * s.y1);
  }

  std::optional<LaneLine> line() const
  {
    if (w <= 0.0) {
      return std::nullopt;
    }
    return LaneLine{dx_dy / w, x_top / w};
  }
};

}  // namespace

LaneGroups group_lanes(std::span<const LineSegment> segments, int img_width, double slope_cutoff)
{
  WeightedSum left;
  WeightedSum right;
  for (const auto & s : segments) {
    if (s.y1 == s.y2) {
      continue;  // horizontal, includes zero-length
    }
    if (s.vertical()) {
      (s.mid_x() < 0.5 * (img_width - 1) ? left : right).add(s);
      continue;
    }
    const double m = s.slope();
    if (m < -slope_cutoff) {
      left.add(s);
    } else if (m > slope_cutoff) {
      right.add(s);
    }
  }
  return {left.line(), right.line()};
}

SteeringEstimate steering_angle(
  const std::optional<LaneLine> & left, const std::optional<LaneLine> & right, int img_width, int img_height,
  double lane_width_px)
{
  if (img_width <= 0 || img_height <= 0) {
    throw ShapeError("steering_angle needs a positive view size");
  }
  const double center = 0.5 * (img_width - 1);
  double target = 0.0;
  SteeringEstimate est;
  if (left && right) {
    target = 0.5 * (left->x_at(0.0) + right->x_at(0.0));
    est.confidence = LaneConfidence::kBothLanes;
  } else if (left) {
    target = left->x_at(0.0) + 0.5 * lane_width_px;
    est.confidence = LaneConfidence::kOneLane;
  } else if (right) {
    target = right->x_at(0.0) - 0.5 * lane_width_px;
    est.confidence = LaneConfidence::kOneLane;
  } else {
    return est;
  }
  est.angle_deg = std::atan2(target - center, static_cast<double>(img_height)) * 180.0 / M_PI;
  return est;
}

AngleSmoother::AngleSmoother(std::size_t window) : window_(window)
{
  if (window_ == 0) {
    throw ValidationError("smoothing window must be at least 1");
  }
}

double AngleSmoother::push(double angle_deg)
{
  history_.push_back(angle_deg);
  while (history_.size() > window_) {
    history_.pop_front();
  }
  return std::accumulate(history_.begin(), history_.end(), 0.0) / static_cast<double>(history_.size());
}

LaneFollower::LaneFollower(LaneParams params) : params_(params), smoother_(params.smoothing_window) {}

SteeringEstimate LaneFollower::estimate(const Image & frame, LaneDebug * debug) const
{
  Image gray = preprocess(frame);
  Image mask = white_mask(gray, params_.mask_lo);
  Image edges = canny(mask, params_.canny);
  auto segments = hough_lines(edges, params_.hough);
  const auto lanes = group_lanes(segments, edges.width(), params_.slope_cutoff);
  const auto est = steering_angle(lanes.left, lanes.right, edges.width(), edges.height(), params_.lane_width_px);
  if (debug != nullptr) {
    debug->gray = std::move(gray);
    debug->mask = std::move(mask);
    debug->edges = std::move(edges);
    debug->segments = std::move(segments);
  }
  return est;
}

SteeringEstimate LaneFollower::process(const Image & frame, LaneDebug * debug)
{
  auto est = estimate(frame, debug);
  est.angle_deg = smoother_.push(est.angle_deg);
  return est;
}

}  // namespace oodsim::vision
