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

#include <optional>

#include "oodsim/control/motor.hpp"
#include "oodsim/core/time.hpp"

namespace oodsim::sim
{

/// 1-D longitudinal vehicle state. Once the latch is engaged the vehicle
/// keeps its speed for at most `coast_left` metres, then halts; wheel
/// commands are ignored from then on.
struct VehicleState
{
  double x = 0.0;
  double v = 0.0;
  const control::EStopLatch * latch = nullptr;
  bool braking = false;
  double coast_left = 0.0;
  bool stopped = false;
};

/// Advances the state by dt seconds under a wheel command.
/// Unlatched: v = mean wheel speed (clamped >= 0), x += v * dt.
/// Latched: the first call after latching arms `coast_m`; travel is capped
/// by the remaining coast distance.
VehicleState step_kinematics(VehicleState state, const control::WheelCommand & cmd, double dt, double coast_m);

/// Time-indexed plant driven by piecewise-constant commands.
class Plant
{
public:
  Plant(const control::EStopLatch & latch, double coast_m, double x0 = 0.0);

  /// Integrates from the last update to t. Raises OrderingError if t goes
  /// backwards.
  void advance_to(Timestamp t);

  /// advance_to(t), then applies the command (ignored once latched).
  void command(const control::WheelCommand & cmd, Timestamp t);

  /// Position at t >= last update without changing state.
  double position_at(Timestamp t) const;

  /// Earliest time >= now at which x reaches target under the current
  /// regime, if it does.
  std::optional<Timestamp> time_to_reach(double target) const;

  /// Time the vehicle halts under the current regime (now if already
  /// stopped; none while moving unlatched).
  std::optional<Timestamp> halt_time() const;

  /// Forces x to a value reached by the caller's exact event math (used at
  /// collisions to remove rounding residue).
  void clamp_position(double x_max);

  const VehicleState & state() const { return state_; }
  Timestamp now() const { return now_; }
  double coast_m() const { return coast_m_; }

private:
  VehicleState state_;
  control::WheelCommand cmd_{};
  double coast_m_;
  Timestamp now_{0};
};

}  // namespace oodsim::sim
