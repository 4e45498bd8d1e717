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

#include "oodsim/control/pid.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::control
{

PidController::PidController(PidGains gains, double output_clamp, double integral_clamp)
: gains_(gains), output_clamp_(output_clamp), integral_clamp_(integral_clamp)
{
  if (!(output_clamp_ > 0.0) || !(integral_clamp_ > 0.0)) {
    throw ValidationError(fmt::format(
      "PID clamps must be positive (output {}, integral {})", output_clamp_, integral_clamp_));
  }
}

double PidController::step(double error, double dt)
{
  if (!std::isfinite(error)) {
    throw NumericError(fmt::format("PID error is not finite ({})", error));
  }
  if (!(dt > 0.0)) {
    throw ValidationError(fmt::format("PID dt must be positive, got {}", dt));
  }
  integral_ = std::clamp(integral_ + error * dt, -integral_clamp_, integral_clamp_);
  const double derivative = (error - previous_) / dt;
  previous_ = error;
  const double u = gains_.kp * error + gains_.ki * integral_ + gains_.kd * derivative;
  return std::clamp(u, -output_clamp_, output_clamp_);
}

void PidController::reset()
{
  integral_ = 0.0;
  previous_ = 0.0;
}

}  // namespace oodsim::control
