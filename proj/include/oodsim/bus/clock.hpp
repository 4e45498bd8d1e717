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

#include <chrono>

#include "oodsim/core/time.hpp"

namespace oodsim::bus
{

/// Time source for all pipeline code.
class Clock
{
public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

/// Monotonic wall time measured from construction.
class WallClock final : public Clock
{
public:
  WallClock();
  Timestamp now() const override;

  std::chrono::steady_clock::time_point origin() const { return origin_; }

private:
  std::chrono::steady_clock::time_point origin_;
};

/// Discrete-event time, moved only by the scheduler. Never goes backwards.
class VirtualClock final : public Clock
{
public:
  explicit VirtualClock(Timestamp start = Timestamp{0}) : now_(start) {}

  Timestamp now() const override { return now_; }

  /// Raises OrderingError if t < now().
  void advance_to(Timestamp t);

private:
  Timestamp now_;
};

}  // namespace oodsim::bus
