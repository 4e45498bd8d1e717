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

#include "oodsim/bus/clock.hpp"

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::bus
{

WallClock::WallClock() : origin_(std::chrono::steady_clock::now()) {}

Timestamp WallClock::now() const
{
  return std::chrono::duration_cast<Timestamp>(std::chrono::steady_clock::now() - origin_);
}

void VirtualClock::advance_to(Timestamp t)
{
  if (t < now_) {
    throw OrderingError(fmt::format(
      "virtual clock cannot move backwards: now {} ns, requested {} ns", now_.count(), t.count()));
  }
  now_ = t;
}

}  // namespace oodsim::bus
