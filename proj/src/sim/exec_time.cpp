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

#include "oodsim/sim/exec_time.hpp"

#include <algorithm>
#include <cmath>

namespace oodsim::sim
{

ExecTimeModel::ExecTimeModel(ExecTimeConfig config, std::uint64_t seed) : config_(std::move(config)), rng_(seed)
{
  config_.validate();
}

double ExecTimeModel::sample_seconds()
{
  switch (config_.kind) {
    case ExecKind::kConstant:
      return config_.constant_s;
    case ExecKind::kLogNormal:
      return std::exp(std::log(config_.median_s) + config_.sigma * normal_(rng_));
    case ExecKind::kEmpirical: {
      const double v = config_.samples[next_];
      next_ = (next_ + 1) % config_.samples.size();
      return v;
    }
  }
  return config_.constant_s;
}

Duration ExecTimeModel::sample()
{
  return std::max(from_seconds(sample_seconds()), Duration{1});
}

}  // namespace oodsim::sim
