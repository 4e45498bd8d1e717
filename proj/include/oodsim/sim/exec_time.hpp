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

#include <cstddef>
#include <cstdint>
#include <random>

#include "oodsim/core/time.hpp"
#include "oodsim/sim/config.hpp"

namespace oodsim::sim
{

/// Seeded detector execution-time source.
class ExecTimeModel
{
public:
  ExecTimeModel(ExecTimeConfig config, std::uint64_t seed);

  /// Next duration in seconds; always > 0.
  double sample_seconds();

  /// Next duration rounded to the nanosecond, at least 1 ns.
  Duration sample();

  const ExecTimeConfig & config() const { return config_; }

private:
  ExecTimeConfig config_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::size_t next_ = 0;
};

}  // namespace oodsim::sim
