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
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "oodsim/vision/canny.hpp"
#include "oodsim/vision/hough.hpp"
#include "oodsim/vision/image.hpp"

namespace oodsim::vision
{

/// Lane boundary as x = x_top + dx_dy * y (image coordinates, y down).
/// This form stays finite for vertical segments.
struct LaneLine
{
  double dx_dy = 0.0;
  double x_top = 0.0;

  double x_at(double y) const { return x_top + dx_dy * y; }
};

struct LaneGroups
{
  std::optional<LaneLine> left;
  std::optional<LaneLine> right;
};

inline constexpr double kDefaultSlopeCutoff = 0.3;

/// Segments with dy/dx < -cutoff are left candidates, > cutoff right;
/// |dy/dx| <= cutoff is discarded; vertical segments go to the side of
/// their x-midpoint. Each side is the length-weighted mean of its
/// candidates' (dx_dy, x_top).
LaneGroups group_lanes(std::span<const LineSegment> segments, int img_width, double slope_cutoff = kDefaultSlopeCutoff);

enum class LaneConfidence : std::uint8_t { kNone, kOneLane, kBothLanes };

struct SteeringEstimate
{
  /// Degrees, positive steers right, within [-90, 90].
  double angle_deg = 0.0;
  LaneConfidence confidence = LaneConfidence::kNone;
};

/// Aims at the lane centre on row 0 (top of the view). The look-ahead
/// distance is the view height; the image centre is (width - 1) / 2 so a
/// mirrored view gives exactly the negated angle. With one lane the centre
/// is that lane offset by half of `lane_width_px`.
SteeringEstimate steering_angle(
  const std::optional<LaneLine> & left, const std::optional<LaneLine> & right, int img_width, int img_height,
  double lane_width_px);

/// Moving average over the last n angles.
class AngleSmoother
{
public:
  explicit AngleSmoother(std::size_t window = 5);

  double push(double angle_deg);
  std::size_t window() const { return window_; }
  std::size_t size() const { return history_.size(); }

private:
  std::size_t window_;
  std::deque<double> history_;
};

struct LaneParams
{
  std::uint8_t mask_lo = 200;
  CannyParams canny{};
  HoughParams hough{};
  double slope_cutoff = kDefaultSlopeCutoff;
  std::size_t smoothing_window = 5;
  /// Nominal lane width on the top row of the 128x48 view.
  double lane_width_px = 20.0;
};

/// Optional intermediate images of one pipeline pass.
struct LaneDebug
{
  Image gray;
  Image mask;
  Image edges;
  std::vector<LineSegment> segments;
};

/// Full lane-following pipeline for one 640x480 RGB frame; owns the
/// smoothing history.
class LaneFollower
{
public:
  explicit LaneFollower(LaneParams params = {});

  /// Raw (unsmoothed) estimate for a frame; pure.
  SteeringEstimate estimate(const Image & frame, LaneDebug * debug = nullptr) const;

  /// Estimate followed by the averaging filter.
  SteeringEstimate process(const Image & frame, LaneDebug * debug = nullptr);

  const LaneParams & params() const { return params_; }

private:
  LaneParams params_;
  AngleSmoother smoother_;
};

}  // namespace oodsim::vision
