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

#include "oodsim/vision/canny.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::vision
{
namespace
{

constexpr double kSigma = 1.4;

int clampi(int v, int hi)
{
  return v < 0 ? 0 : (v > hi ? hi : v);
}

void validate(const Image & gray, const CannyParams & p)
{
  if (gray.channels() != 1) {
    throw ShapeError("canny expects a grayscale image");
  }
  if (gray.width() < 5 || gray.height() < 5) {
    throw ShapeError(fmt::format("canny needs at least 5x5 pixels, got {}x{}", gray.width(), gray.height()));
  }
  if (!(p.low >= 0.0) || !(p.low <= p.high)) {
    throw ValidationError(fmt::format("canny thresholds must satisfy 0 <= low <= high, got {} / {}", p.low, p.high));
  }
}

// Per-pixel stage bodies shared by both builds.

float blur_at(const Image & g, int x, int y)
{
  const auto & k = gaussian5x5();
  const int w1 = g.width() - 1;
  const int h1 = g.height() - 1;
  float acc = 0.0f;
  for (int dy = -2; dy <= 2; ++dy) {
    const int yy = clampi(y + dy, h1);
    for (int dx = -2; dx <= 2; ++dx) {
      acc += k[(dy + 2) * 5 + (dx + 2)] * static_cast<float>(g.at(clampi(x + dx, w1), yy));
    }
  }
  return acc;
}

void sobel_at(const std::vector<float> & b, int w, int h, int x, int y, float & gx, float & gy)
{
  const auto px = [&](int xx, int yy) { return b[static_cast<std::size_t>(clampi(yy, h - 1)) * w + clampi(xx, w - 1)]; };
  const float tl = px(x - 1, y - 1), tc = px(x, y - 1), tr = px(x + 1, y - 1);
  const float ml = px(x - 1, y), mr = px(x + 1, y);
  const float bl = px(x - 1, y + 1), bc = px(x, y + 1), br = px(x + 1, y + 1);
  gx = (tr + 2.0f * mr + br) - (tl + 2.0f * ml + bl);
  gy = (bl + 2.0f * bc + br) - (tl + 2.0f * tc + tr);
}

float nms_at(const CannyStages & s, int x, int y)
{
  const int w = s.width;
  if (x == 0 || y == 0 || x == w - 1 || y == s.height - 1) {
    return 0.0f;
  }
  const std::size_t i = static_cast<std::size_t>(y) * w + x;
  const float m = s.magnitude[i];
  if (m <= 0.0f) {
    return 0.0f;
  }
  double angle = std::atan2(static_cast<double>(s.gy[i]), static_cast<double>(s.gx[i])) * 180.0 / M_PI;
  if (angle < 0.0) {
    angle += 180.0;
  }
  int ox = 0;
  int oy = 0;
  if (angle < 22.5 || angle >= 157.5) {
    ox = 1;
  } else if (angle < 67.5) {
    ox = 1;
    oy = 1;
  } else if (angle < 112.5) {
    oy = 1;
  } else {
    ox = -1;
    oy = 1;
  }
  const float n1 = s.magnitude[static_cast<std::size_t>(y + oy) * w + (x + ox)];
  const float n2 = s.magnitude[static_cast<std::size_t>(y - oy) * w + (x - ox)];
  return (m >= n1 && m >= n2) ? m : 0.0f;
}

Image hysteresis(const CannyStages & s, const CannyParams & p)
{
  const int w = s.width;
  const int h = s.height;
  Image out(w, h, 1);
  std::vector<int> stack;
  const auto n = static_cast<std::size_t>(w) * h;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.thin[i] >= p.high && s.thin[i] > 0.0f) {
      out.data()[i] = 255;
      stack.push_back(static_cast<int>(i));
    }
  }
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    const int x = i % w;
    const int y = i / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int xx = x + dx;
        const int yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= w || yy >= h) {
          continue;
        }
        const int j = yy * w + xx;
        if (out.data()[j] == 0 && s.thin[j] > 0.0f && s.thin[j] >= p.low) {
          out.data()[j] = 255;
          stack.push_back(j);
        }
      }
    }
  }
  return out;
}

CannyStages allocate(const Image & gray)
{
  CannyStages s;
  s.width = gray.width();
  s.height = gray.height();
  const auto n = static_cast<std::size_t>(s.width) * s.height;
  s.blurred.assign(n, 0.0f);
  s.gx.assign(n, 0.0f);
  s.gy.assign(n, 0.0f);
  s.magnitude.assign(n, 0.0f);
  s.thin.assign(n, 0.0f);
  return s;
}

}  // namespace

const std::vector<float> & gaussian5x5()
{
  static const std::vector<float> taps = [] {
    std::vector<double> k(25);
    double sum = 0.0;
    for (int y = -2; y <= 2; ++y) {
      for (int x = -2; x <= 2; ++x) {
        const double v = std::exp(-(x * x + y * y) / (2.0 * kSigma * kSigma));
        k[(y + 2) * 5 + (x + 2)] = v;
        sum += v;
      }
    }
    std::vector<float> out(25);
    for (int i = 0; i < 25; ++i) {
      out[i] = static_cast<float>(k[i] / sum);
    }
    return out;
  }();
  return taps;
}

namespace reference
{

CannyStages canny_stages(const Image & gray, const CannyParams & params)
{
  validate(gray, params);
  CannyStages s = allocate(gray);
  const int w = s.width;
  const int h = s.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      s.blurred[static_cast<std::size_t>(y) * w + x] = blur_at(gray, x, y);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      sobel_at(s.blurred, w, h, x, y, s.gx[i], s.gy[i]);
      s.magnitude[i] = std::sqrt(s.gx[i] * s.gx[i] + s.gy[i] * s.gy[i]);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      s.thin[static_cast<std::size_t>(y) * w + x] = nms_at(s, x, y);
    }
  }
  s.edges = hysteresis(s, params);
  return s;
}

Image canny(const Image & gray, const CannyParams & params)
{
  return reference::canny_stages(gray, params).edges;
}

}  // namespace reference

CannyStages canny_stages(const Image & gray, const CannyParams & params)
{
  validate(gray, params);
  CannyStages s = allocate(gray);
  const int w = s.width;
  const int h = s.height;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        s.blurred[static_cast<std::size_t>(y) * w + x] = blur_at(gray, x, y);
      }
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        sobel_at(s.blurred, w, h, x, y, s.gx[i], s.gy[i]);
        s.magnitude[i] = std::sqrt(s.gx[i] * s.gx[i] + s.gy[i] * s.gy[i]);
      }
    }
#pragma omp for schedule(static)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        s.thin[static_cast<std::size_t>(y) * w + x] = nms_at(s, x, y);
      }
    }
  }
  s.edges = hysteresis(s, params);
  return s;
}

Image canny(const Image & gray, const CannyParams & params)
{
  return canny_stages(gray, params).edges;
}

}  // namespace oodsim::vision
