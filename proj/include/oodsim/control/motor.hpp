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

#include <atomic>
#include <climits>
#include <cstdint>
#include <optional>

#include "oodsim/control/pid.hpp"
#include "oodsim/core/time.hpp"

namespace oodsim::control
{

struct WheelCommand
{
  double left = 0.0;
  double right = 0.0;
  Timestamp t{0};

  double forward_speed() const { return 0.5 * (left + right); }
};

/// left = v + gain*steer, right = v - gain*steer, each clamped to
/// [0, v_max]. Positive steer turns right.
WheelCommand wheel_velocities(double v_nominal, double steer, double gain, double v_max, Timestamp t = Timestamp{0});

/// One-way emergency-stop flag. engage() may be called from any thread;
/// the first engagement's timestamp wins.
class EStopLatch
{
public:
  /// Returns true when this call latched it.
  bool engage(Timestamp t);
  void reset();

  bool latched() const { return latch_ns_.load(std::memory_order_acquire) != kUnlatched; }
  std::optional<Timestamp> latch_time() const;

private:
  static constexpr std::int64_t kUnlatched = INT64_MIN;
  std::atomic<std::int64_t> latch_ns_{kUnlatched};
};

struct MotorParams
{
  PidGains gains{};
  double output_clamp = 1.0;
  double integral_clamp = 10.0;
  double v_nominal = 0.1;
  double v_max = 0.5;
  double steer_gain = 0.1;
};

/// Motor-control node logic: steering angle -> PID -> wheel command, with
/// the e-stop latch overriding everything.
class MotorController
{
public:
  MotorController(MotorParams params, EStopLatch & latch);

  /// Steering angle in degrees (positive right) arriving at time t.
  WheelCommand on_steering(double angle_deg, Timestamp t);

  /// Latches the e-stop and returns the zero command.
  WheelCommand on_estop(Timestamp t);

  /// Command for driving straight (used at start-up).
  WheelCommand initial(Timestamp t) const;

  const MotorParams & params() const { return params_; }
  const PidController & pid() const { return pid_; }

private:
  MotorParams params_;
  EStopLatch & latch_;
  PidController pid_;
  std::optional<Timestamp> last_steering_;
};

}  // namespace oodsim::control
