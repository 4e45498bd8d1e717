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
#include <cstdint>

namespace oodsim
{

/// Nanoseconds since the start of the active clock's epoch.
using Timestamp = std::chrono::nanoseconds;
using Duration = std::chrono::nanoseconds;

/// Rounds to the nearest nanosecond.
inline Duration from_seconds(double s)
{
  return std::chrono::round<Duration>(std::chrono::duration<double>(s));
}

inline double to_seconds(Duration d)
{
  return std::chrono::duration<double>(d).count();
}

}  // namespace oodsim
