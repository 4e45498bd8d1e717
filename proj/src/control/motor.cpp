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

#include "oodsim/control/motor.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::control
{
namespace
{
// dt assumed for the very first steering message.
constexpr double kFirstStepDt = 0.2;
}  // namespace

WheelCommand wheel_velocities(double v_nominal, double steer, double gain, double v_max, Timestamp t)
{
  if (!(v_nominal >= 0.0)) {
    throw ValidationError(fmt::format("nominal speed must be >= 0, got {}", v_nominal));
  }
  WheelCommand cmd;
  cmd.left = std::clamp(v_nominal + gain * steer, 0.0, v_max);
  cmd.right = std::clamp(v_nominal - gain * steer, 0.0, v_max);
  cmd.t = t;
  return cmd;
}

bool EStopLatch::engage(Timestamp t)
{
  std::int64_t expected = kUnlatched;
  return latch_ns_.compare_exchange_strong(expected, t.count(), std::memory_order_acq_rel);
}

void EStopLatch::reset()
{
  latch_ns_.store(kUnlatched, std::memory_order_release);
}

std::optional<Timestamp> EStopLatch::latch_time() const
{
  const std::int64_t ns = latch_ns_.load(std::memory_order_acquire);
  if (ns == kUnlatched) {
    return std::nullopt;
  }
  return Timestamp{ns};
}

MotorController::MotorController(MotorParams params, EStopLatch & latch)
: params_(params), latch_(latch), pid_(params.gains, params.output_clamp, params.integral_clamp)
{
  if (!(params_.v_max > 0.0) || params_.v_nominal > params_.v_max) {
    throw ValidationError(fmt::format(
      "motor speeds invalid: v_nominal {} must lie in [0, v_max = {}]", params_.v_nominal, params_.v_max));
  }
}

WheelCommand MotorController::on_steering(double angle_deg, Timestamp t)
{
  if (latch_.latched()) {
    return {0.0, 0.0, t};
  }
  double dt = kFirstStepDt;
  if (last_steering_ && t > *last_steering_) {
    dt = to_seconds(t - *last_steering_);
  }
  last_steering_ = t;
  const double steer = pid_.step(angle_deg, dt);
  return wheel_velocities(params_.v_nominal, steer, params_.steer_gain, params_.v_max, t);
}

WheelCommand MotorController::on_estop(Timestamp t)
{
  latch_.engage(t);
  return {0.0, 0.0, t};
}

WheelCommand MotorController::initial(Timestamp t) const
{
  if (latch_.latched()) {
    return {0.0, 0.0, t};
  }
  return wheel_velocities(params_.v_nominal, 0.0, params_.steer_gain, params_.v_max, t);
}

}  // namespace oodsim::control
