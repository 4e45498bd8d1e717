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

#include "oodsim/vision/hough.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::vision
{
namespace
{

struct EdgePixel
{
  int x;
  int y;
};

std::vector<EdgePixel> edge_pixels(const Image & edges)
{
  if (edges.channels() != 1) {
    throw ShapeError("hough expects a single-channel edge map");
  }
  std::vector<EdgePixel> px;
  for (int y = 0; y < edges.height(); ++y) {
    for (int x = 0; x < edges.width(); ++x) {
      if (edges.at(x, y) != 0) {
        px.push_back({x, y});
      }
    }
  }
  return px;
}

void validate(double rho_res, double theta_res_deg)
{
  if (!(rho_res > 0.0) || !(theta_res_deg > 0.0) || theta_res_deg > 180.0) {
    throw ValidationError(fmt::format("hough resolutions must be positive (rho {}, theta {})", rho_res, theta_res_deg));
  }
}

}  // namespace

HoughAccumulator::HoughAccumulator(int width, int height, double rho_res, double theta_res_deg)
: rho_res_(rho_res), theta_res_deg_(theta_res_deg), cx_(0.5 * (width - 1)), cy_(0.5 * (height - 1))
{
  validate(rho_res, theta_res_deg);
  const double half_diag = 0.5 * std::hypot(width, height);
  rho_offset_ = static_cast<int>(std::ceil(half_diag / rho_res)) + 1;
  rho_bins_ = 2 * rho_offset_ + 1;
  theta_bins_ = std::max(1, static_cast<int>(std::lround(180.0 / theta_res_deg)));
  cos_.resize(theta_bins_);
  sin_.resize(theta_bins_);
  for (int k = 0; k < theta_bins_; ++k) {
    const double deg = theta_deg(k);
    const double rad = deg * M_PI / 180.0;
    // Exact values on the axes: centred coordinates are half-integers on
    // even-sized images, so a 1e-17 residue would split axis-aligned lines.
    cos_[k] = deg == 90.0 ? 0.0 : std::cos(rad);
    sin_[k] = deg == 0.0 ? 0.0 : (deg == 90.0 ? 1.0 : std::sin(rad));
  }
  // When the bins tile [0, 180) exactly, pin bin 180 - theta to the exact
  // mirror of bin theta so the symmetry survives rounding.
  if (std::fabs(theta_bins_ * theta_res_deg - 180.0) < 1e-9) {
    for (int k = 1; 2 * k < theta_bins_; ++k) {
      cos_[theta_bins_ - k] = -cos_[k];
      sin_[theta_bins_ - k] = sin_[k];
    }
  }
  votes_.assign(static_cast<std::size_t>(rho_bins_) * theta_bins_, 0);
}

HoughAccumulator hough_accumulate(const Image & edges, double rho_res, double theta_res_deg)
{
  HoughAccumulator acc(edges.width(), edges.height(), rho_res, theta_res_deg);
  const auto px = edge_pixels(edges);
  const int n_theta = acc.theta_bins();
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n_theta; ++k) {
    for (const auto & p : px) {
      ++acc.votes(acc.rho_bin(p.x, p.y, k), k);
    }
  }
  return acc;
}

namespace reference
{

HoughAccumulator hough_accumulate(const Image & edges, double rho_res, double theta_res_deg)
{
  HoughAccumulator acc(edges.width(), edges.height(), rho_res, theta_res_deg);
  for (const auto & p : edge_pixels(edges)) {
    for (int k = 0; k < acc.theta_bins(); ++k) {
      ++acc.votes(acc.rho_bin(p.x, p.y, k), k);
    }
  }
  return acc;
}

}  // namespace reference

std::vector<HoughPeak> hough_peaks(const HoughAccumulator & acc, int min_votes)
{
  if (min_votes < 1) {
    throw ValidationError(fmt::format("hough vote threshold must be >= 1, got {}", min_votes));
  }
  std::vector<HoughPeak> peaks;
  const int nr = acc.rho_bins();
  const int nt = acc.theta_bins();
  // Equal-vote neighbours are ranked by distance of theta from 90 degrees,
  // then by rho bin. Both are preserved by a horizontal mirror, so mirrored
  // images yield mirrored peaks.
  const auto ranks_before = [&](int r1, int k1, int r2, int k2) {
    const double d1 = std::fabs(acc.theta_deg(k1) - 90.0);
    const double d2 = std::fabs(acc.theta_deg(k2) - 90.0);
    return d1 < d2 || (d1 == d2 && r1 < r2);
  };
  for (int k = 0; k < nt; ++k) {
    for (int r = 0; r < nr; ++r) {
      const int v = acc.votes(r, k);
      if (v < min_votes) {
        continue;
      }
      bool is_peak = true;
      for (int dk = -1; dk <= 1 && is_peak; ++dk) {
        for (int dr = -1; dr <= 1; ++dr) {
          const int kk = k + dk;
          const int rr = r + dr;
          if ((dk == 0 && dr == 0) || kk < 0 || kk >= nt || rr < 0 || rr >= nr) {
            continue;
          }
          const int nv = acc.votes(rr, kk);
          if (nv > v || (nv == v && ranks_before(rr, kk, r, k))) {
            is_peak = false;
            break;
          }
        }
      }
      if (is_peak) {
        peaks.push_back({r, k, acc.rho(r), acc.theta_deg(k), v});
      }
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const HoughPeak & a, const HoughPeak & b) {
    return a.votes > b.votes;
  });
  return peaks;
}

std::vector<LineSegment> hough_lines(const Image & edges, const HoughParams & params)
{
  validate(params.rho_res, params.theta_res_deg);
  if (params.votes < 1 || params.min_len < 0.0 || params.max_gap < 0.0) {
    throw ValidationError("hough votes must be >= 1 and lengths non-negative");
  }
  const auto px = edge_pixels(edges);
  if (px.empty()) {
    return {};
  }
  const HoughAccumulator acc = hough_accumulate(edges, params.rho_res, params.theta_res_deg);
  std::vector<LineSegment> segments;
  struct Support
  {
    double t;
    EdgePixel p;
  };
  std::vector<Support> support;
  for (const auto & peak : hough_peaks(acc, params.votes)) {
    const int k = peak.theta_bin;
    const double c = acc.cos_theta(k);
    const double s = acc.sin_theta(k);
    support.clear();
    // Support is a band of one bin either side of the peak line rather than
    // the peak bin alone, so a digital line is collected whole regardless of
    // where the bin edges fall (keeps the output mirror-symmetric).
    for (const auto & p : px) {
      if (std::fabs(acc.rho_of(p.x, p.y, k) - peak.rho) <= params.rho_res) {
        support.push_back({-p.x * s + p.y * c, p});
      }
    }
    std::sort(support.begin(), support.end(), [](const Support & a, const Support & b) {
      return a.t < b.t || (a.t == b.t && (a.p.y < b.p.y || (a.p.y == b.p.y && a.p.x < b.p.x)));
    });
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= support.size(); ++i) {
      if (i == support.size() || support[i].t - support[i - 1].t > params.max_gap) {
        const auto & first = support[begin];
        const auto & last = support[i - 1];
        if (last.t - first.t >= params.min_len) {
          segments.push_back({first.p.x, first.p.y, last.p.x, last.p.y});
        }
        begin = i;
      }
    }
  }
  return segments;
}

}  // namespace oodsim::vision
