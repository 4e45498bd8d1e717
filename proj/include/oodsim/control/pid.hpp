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

#include "oodsim/core/time.hpp"

namespace oodsim::control
{

struct PidGains
{
  double kp = 0.05;
  double ki = 0.0;
  double kd = 0.01;
};

/// Discrete PID with anti-windup on the integral and a symmetric output
/// clamp. Owned by a single control task.
class PidController
{
public:
  PidController(PidGains gains = {}, double output_clamp = 1.0, double integral_clamp = 10.0);

  /// u = kp*e + ki*integral + kd*(e - e_prev)/dt. The integral is updated
  /// and clamped first; the output is clamped last. dt in seconds.
  double step(double error, double dt);

  void reset();

  double integral() const { return integral_; }
  double previous_error() const { return previous_; }
  const PidGains & gains() const { return gains_; }
  double output_clamp() const { return output_clamp_; }
  double integral_clamp() const { return integral_clamp_; }

private:
  PidGains gains_;
  double output_clamp_;
  double integral_clamp_;
  double integral_ = 0.0;
  double previous_ = 0.0;
};

}  // namespace oodsim::control
