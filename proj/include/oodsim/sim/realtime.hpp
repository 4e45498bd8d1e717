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

#include <memory>

#include "oodsim/ood/scorer.hpp"
#include "oodsim/sim/config.hpp"
#include "oodsim/sim/run_log.hpp"

namespace oodsim::sim
{

/// Runs the scenario in wall-clock time with one thread per node (camera,
/// detector, lane follower, motor) talking only through bus topics and
/// the e-stop latch. A supervisor on the calling thread watches the
/// vehicle and ends the run. Timing, hence the log, is not reproducible.
RunLog run_realtime(const ScenarioConfig & config, std::shared_ptr<const ood::Scorer> scorer);

}  // namespace oodsim::sim
