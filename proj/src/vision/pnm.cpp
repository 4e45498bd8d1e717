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

#include "oodsim/vision/pnm.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::vision
{
namespace
{

// Reads the next header integer, skipping whitespace and # comments.
int header_int(std::istream & in)
{
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = -1;
  if (!(in >> v) || v < 0) {
    throw FormatError("malformed PNM header");
  }
  return v;
}

}  // namespace

void write_pnm(std::ostream & out, const Image & img)
{
  out << (img.channels() == 3 ? "P6" : "P5") << '\n'
      << img.width() << ' ' << img.height() << '\n'
      << "255\n";
  out.write(reinterpret_cast<const char *>(img.data().data()), static_cast<std::streamsize>(img.data().size()));
}

void write_pnm(const std::filesystem::path & path, const Image & img)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw FormatError(fmt::format("cannot write {}", path.string()));
  }
  write_pnm(out, img);
}

Image read_pnm(std::istream & in)
{
  char magic[2] = {};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw FormatError("not a binary PGM/PPM file");
  }
  const int channels = magic[1] == '6' ? 3 : 1;
  const int w = header_int(in);
  const int h = header_int(in);
  const int maxval = header_int(in);
  if (maxval != 255) {
    throw FormatError(fmt::format("PNM maxval {} unsupported (only 255)", maxval));
  }
  in.get();  // single whitespace before raster
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * channels);
  in.read(reinterpret_cast<char *>(data.data()), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw FormatError("PNM raster truncated");
  }
  return Image(w, h, channels, std::move(data));
}

Image read_pnm(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(fmt::format("cannot open {}", path.string()));
  }
  return read_pnm(in);
}

}  // namespace oodsim::vision
