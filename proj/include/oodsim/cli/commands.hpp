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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace oodsim::cli
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

/// Fixed default seed so every command is reproducible.
inline constexpr std::uint64_t kDefaultSeed = 7;

struct Options
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::size_t runs = 40;
  std::vector<double> thresholds;
  std::optional<std::string> scorer;
  std::string weights;
  bool emit_svg = false;
  /// Input directory of run logs (sweep, report, replay).
  std::string logs;
  /// render-dataset.
  std::size_t frames = 64;
  double ood_fraction = 0.0;
  /// select-detectors.
  std::size_t k = 5;
  /// simulate.
  bool realtime = false;
};

int cmd_render_dataset(const Options & o);
int cmd_calibrate(const Options & o);
int cmd_select_detectors(const Options & o);
int cmd_simulate(const Options & o);
int cmd_campaign(const Options & o);
int cmd_sweep(const Options & o);
int cmd_report(const Options & o);
int cmd_replay(const Options & o);

/// Configures spdlog from OODSIM_LOG (trace|debug|info|warn|error|off;
/// default warn), logging to stderr.
void init_logging();

/// Parses argv, runs the subcommand and maps errors to exit codes:
/// 0 success, 1 usage, 2 data/validation, 3 internal invariant.
int run(int argc, char ** argv);

}  // namespace oodsim::cli
