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

#include <cmath>
#include <limits>
#include <vector>

#include "oodsim/vision/image.hpp"

namespace oodsim::vision
{

struct HoughParams
{
  double rho_res = 1.0;
  double theta_res_deg = 1.0;
  int votes = 15;
  double min_len = 10.0;
  double max_gap = 4.0;
};

struct LineSegment
{
  int x1 = 0;
  int y1 = 0;
  int x2 = 0;
  int y2 = 0;

  bool vertical() const { return x1 == x2; }
  /// dy/dx in image coordinates (y down); +infinity for vertical segments.
  double slope() const
  {
    return vertical() ? std::numeric_limits<double>::infinity()
                      : static_cast<double>(y2 - y1) / static_cast<double>(x2 - x1);
  }
  double length() const { return std::hypot(x2 - x1, y2 - y1); }
  double mid_x() const { return 0.5 * (x1 + x2); }

  friend bool operator==(const LineSegment &, const LineSegment &) = default;
};

/// (rho, theta) vote grid for the normal form
/// rho = (x - cx) cos(theta) + (y - cy) sin(theta), theta in [0, 180) degrees,
/// with (cx, cy) the image centre. The centred origin makes the grid exactly
/// mirror-symmetric: mirroring the image maps (rho, theta) to
/// (rho, 180 - theta).
class HoughAccumulator
{
public:
  HoughAccumulator(int width, int height, double rho_res, double theta_res_deg);

  int rho_bins() const { return rho_bins_; }
  int theta_bins() const { return theta_bins_; }
  double rho_res() const { return rho_res_; }
  double theta_res_deg() const { return theta_res_deg_; }

  double theta_deg(int k) const { return k * theta_res_deg_; }
  double rho(int r) const { return (r - rho_offset_) * rho_res_; }
  double cos_theta(int k) const { return cos_[k]; }
  double sin_theta(int k) const { return sin_[k]; }
  double cx() const { return cx_; }
  double cy() const { return cy_; }

  /// Signed distance of pixel (x, y) along the normal at angle index k.
  double rho_of(int x, int y, int k) const { return (x - cx_) * cos_[k] + (y - cy_) * sin_[k]; }

  /// Bin of pixel (x, y) at angle index k.
  int rho_bin(int x, int y, int k) const
  {
    return static_cast<int>(std::lround(rho_of(x, y, k) / rho_res_)) + rho_offset_;
  }

  int votes(int r, int k) const { return votes_[static_cast<std::size_t>(k) * rho_bins_ + r]; }
  int & votes(int r, int k) { return votes_[static_cast<std::size_t>(k) * rho_bins_ + r]; }
  const std::vector<int> & grid() const { return votes_; }

private:
  int rho_bins_;
  int theta_bins_;
  int rho_offset_;
  double rho_res_;
  double theta_res_deg_;
  double cx_;
  double cy_;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<int> votes_;
};

struct HoughPeak
{
  int rho_bin = 0;
  int theta_bin = 0;
  double rho = 0.0;
  double theta_deg = 0.0;
  int votes = 0;
};

/// Every nonzero pixel votes once per theta column. Columns are filled in
/// parallel.
HoughAccumulator hough_accumulate(const Image & edges, double rho_res, double theta_res_deg);

namespace reference
{
/// Pixel-major serial voting.
HoughAccumulator hough_accumulate(const Image & edges, double rho_res, double theta_res_deg);
}  // namespace reference

/// Cells with at least `min_votes` that are 3x3 local maxima. Plateau ties
/// go to the cell with the smaller grid index. Sorted by votes (desc), then
/// theta, then rho.
std::vector<HoughPeak> hough_peaks(const HoughAccumulator & acc, int min_votes);

/// Standard Hough transform followed by segment extraction: the supporting
/// pixels of each peak are ordered along the line and split wherever the
/// gap exceeds max_gap; runs at least min_len long become segments.
std::vector<LineSegment> hough_lines(const Image & edges, const HoughParams & params = {});

}  // namespace oodsim::vision
