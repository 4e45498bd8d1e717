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

#include "oodsim/sim/plant.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::sim
{

VehicleState step_kinematics(VehicleState s, const control::WheelCommand & cmd, double dt, double coast_m)
{
  if (!(dt > 0.0)) {
    throw ValidationError(fmt::format("kinematics step needs dt > 0, got {}", dt));
  }
  const bool latched = s.latch != nullptr && s.latch->latched();
  if (latched) {
    if (!s.braking) {
      s.braking = true;
      s.coast_left = coast_m;
    }
    const double d = std::min(s.v * dt, s.coast_left);
    s.x += d;
    s.coast_left -= d;
    if (s.coast_left <= 0.0 || s.v <= 0.0) {
      s.coast_left = 0.0;
      s.v = 0.0;
      s.stopped = true;
    }
    return s;
  }
  s.v = std::max(0.0, cmd.forward_speed());
  s.x += s.v * dt;
  s.stopped = s.v == 0.0;
  return s;
}

Plant::Plant(const control::EStopLatch & latch, double coast_m, double x0) : coast_m_(coast_m)
{
  if (!(coast_m >= 0.0)) {
    throw ValidationError(fmt::format("coast distance must be >= 0, got {}", coast_m));
  }
  state_.x = x0;
  state_.latch = &latch;
  state_.stopped = true;
}

void Plant::advance_to(Timestamp t)
{
  if (t < now_) {
    throw OrderingError(fmt::format("plant time cannot go back from {} ns to {} ns", now_.count(), t.count()));
  }
  const bool latched = state_.latch->latched();
  if (t > now_) {
    state_ = step_kinematics(state_, cmd_, to_seconds(t - now_), coast_m_);
  } else if (latched && !state_.braking) {
    // Zero-length step: arm the coast without moving.
    state_.braking = true;
    state_.coast_left = coast_m_;
    if (coast_m_ <= 0.0 || state_.v <= 0.0) {
      state_.v = 0.0;
      state_.stopped = true;
    }
  }
  now_ = t;
}

void Plant::command(const control::WheelCommand & cmd, Timestamp t)
{
  advance_to(t);
  if (state_.braking) {
    return;
  }
  cmd_ = cmd;
  state_.v = std::max(0.0, cmd.forward_speed());
  state_.stopped = state_.v == 0.0;
}

double Plant::position_at(Timestamp t) const
{
  if (t <= now_) {
    return state_.x;
  }
  const double travel = state_.v * to_seconds(t - now_);
  return state_.x + (state_.braking ? std::min(travel, state_.coast_left) : travel);
}

std::optional<Timestamp> Plant::time_to_reach(double target) const
{
  if (state_.x >= target) {
    return now_;
  }
  if (state_.v <= 0.0) {
    return std::nullopt;
  }
  const double gap = target - state_.x;
  if (state_.braking && state_.coast_left < gap) {
    return std::nullopt;
  }
  return now_ + from_seconds(gap / state_.v);
}

std::optional<Timestamp> Plant::halt_time() const
{
  if (state_.stopped || state_.v <= 0.0) {
    return now_;
  }
  if (!state_.braking) {
    return std::nullopt;
  }
  return now_ + from_seconds(state_.coast_left / state_.v);
}

void Plant::clamp_position(double x_max)
{
  state_.x = std::min(state_.x, x_max);
}

}  // namespace oodsim::sim
