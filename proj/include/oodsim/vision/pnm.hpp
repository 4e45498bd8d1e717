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

#include <filesystem>
#include <iosfwd>

#include "oodsim/vision/image.hpp"

namespace oodsim::vision
{

/// Binary PPM (P6, RGB) or PGM (P5, gray) with maxval 255.
void write_pnm(std::ostream & out, const Image & img);
void write_pnm(const std::filesystem::path & path, const Image & img);
Image read_pnm(std::istream & in);
Image read_pnm(const std::filesystem::path & path);

}  // namespace oodsim::vision
