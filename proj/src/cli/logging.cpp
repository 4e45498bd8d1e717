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

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "oodsim/cli/commands.hpp"

namespace oodsim::cli
{

void init_logging()
{
  auto logger = spdlog::stderr_color_mt("oodsim");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char * env = std::getenv("OODSIM_LOG")) {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; keep warnings in that case.
    if (level == spdlog::level::off && std::string(env) != "off") {
      level = spdlog::level::warn;
    }
  }
  spdlog::set_level(level);
}

}  // namespace oodsim::cli
