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

// Serial reference vs OpenMP kernels on detector-sized inputs.

#include <benchmark/benchmark.h>

#include <random>

#include "oodsim/nn/architecture.hpp"
#include "oodsim/nn/kernels.hpp"
#include "oodsim/nn/model.hpp"
#include "oodsim/sim/render.hpp"
#include "oodsim/vision/canny.hpp"
#include "oodsim/vision/hough.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace
{

using namespace oodsim;

nn::Tensor random_tensor(nn::Tensor::Shape shape, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  nn::Tensor t(std::move(shape));
  for (auto & v : t.data()) {
    v = u(rng);
  }
  return t;
}

// Second conv block of the encoder: 32 -> 64 channels, 5x5, 48x128.
struct ConvCase
{
  nn::Tensor input = random_tensor({32, 48, 128}, 1);
  nn::Conv2D layer{random_tensor({64, 32, 5, 5}, 2), random_tensor({64}, 3), 1, 2};
};

const ConvCase & conv_case()
{
  static const ConvCase c;
  return c;
}

void BM_Conv2D_Reference(benchmark::State & state)
{
  const auto & c = conv_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::reference::conv2d(c.input, c.layer));
  }
}
BENCHMARK(BM_Conv2D_Reference)->Unit(benchmark::kMillisecond);

void BM_Conv2D_Parallel(benchmark::State & state)
{
  const auto & c = conv_case();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::parallel::conv2d(c.input, c.layer));
  }
}
BENCHMARK(BM_Conv2D_Parallel)->Unit(benchmark::kMillisecond);

void BM_Dense_Reference(benchmark::State & state)
{
  static const nn::Tensor x = random_tensor({24576}, 4);
  static const nn::Dense d{random_tensor({1568, 24576}, 5), random_tensor({1568}, 6)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::reference::dense(x, d));
  }
}
BENCHMARK(BM_Dense_Reference)->Unit(benchmark::kMillisecond);

void BM_Dense_Parallel(benchmark::State & state)
{
  static const nn::Tensor x = random_tensor({24576}, 4);
  static const nn::Dense d{random_tensor({1568, 24576}, 5), random_tensor({1568}, 6)};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::parallel::dense(x, d));
  }
}
BENCHMARK(BM_Dense_Parallel)->Unit(benchmark::kMillisecond);

sim::Scene bench_scene()
{
  sim::Scene s;
  s.obstacle = sim::ObstacleKind::kDuck;
  s.distance_m = 0.3;
  s.noise_seed = 9;
  return s;
}

void BM_Render_Reference(benchmark::State & state)
{
  const auto s = bench_scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::reference::render(s));
  }
}
BENCHMARK(BM_Render_Reference)->Unit(benchmark::kMillisecond);

void BM_Render_Parallel(benchmark::State & state)
{
  const auto s = bench_scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::render(s));
  }
}
BENCHMARK(BM_Render_Parallel)->Unit(benchmark::kMillisecond);

const vision::Image & lane_gray()
{
  static const vision::Image g = vision::preprocess(sim::render(bench_scene()));
  return g;
}

void BM_Canny_Reference(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(vision::reference::canny(lane_gray()));
  }
}
BENCHMARK(BM_Canny_Reference)->Unit(benchmark::kMicrosecond);

void BM_Canny_Parallel(benchmark::State & state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(vision::canny(lane_gray()));
  }
}
BENCHMARK(BM_Canny_Parallel)->Unit(benchmark::kMicrosecond);

void BM_Hough_Reference(benchmark::State & state)
{
  const auto edges = vision::canny(lane_gray());
  for (auto _ : state) {
    benchmark::DoNotOptimize(vision::reference::hough_accumulate(edges, 1.0, 1.0));
  }
}
BENCHMARK(BM_Hough_Reference)->Unit(benchmark::kMicrosecond);

void BM_Hough_Parallel(benchmark::State & state)
{
  const auto edges = vision::canny(lane_gray());
  for (auto _ : state) {
    benchmark::DoNotOptimize(vision::hough_accumulate(edges, 1.0, 1.0));
  }
}
BENCHMARK(BM_Hough_Parallel)->Unit(benchmark::kMicrosecond);

void BM_Encode_FullModel(benchmark::State & state)
{
  static const nn::Model model = nn::make_encoder(nn::EncoderSpec{}, 1);
  const auto x = vision::to_tensor(vision::detector_view(sim::render(bench_scene())));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::encode(model, x));
  }
}
BENCHMARK(BM_Encode_FullModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
