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

// Fixture helper for the cross-language interface tests.
//
//   oodsim_fixture export DIR
//       Writes small.oodw and full.oodw (with manifests), detector-view test
//       images img_NN.ppm and expected.json holding the encoder outputs.
//   oodsim_fixture encode WEIGHTS IMAGE.ppm...
//       Loads a weight file and prints {"mu": [...], "logvar": [...]} per
//       image as a JSON array.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "oodsim/nn/architecture.hpp"
#include "oodsim/nn/model.hpp"
#include "oodsim/nn/weights_io.hpp"
#include "oodsim/sim/render.hpp"
#include "oodsim/vision/pnm.hpp"
#include "oodsim/vision/preprocess.hpp"

namespace
{

using namespace oodsim;
namespace fs = std::filesystem;
using nlohmann::json;

json encode_json(const nn::Model & model, const vision::Image & img)
{
  const auto stats = nn::encode(model, vision::to_tensor(img));
  return {{"mu", stats.mu}, {"logvar", stats.logvar}};
}

int cmd_export(const fs::path & dir)
{
  fs::create_directories(dir);
  nn::EncoderSpec small;
  small.conv_channels = {4, 6, 8, 8};
  small.hidden = 24;
  small.latent_dim = 6;
  const nn::Model small_model = nn::make_encoder(small, 11);
  const nn::Model full_model = nn::make_encoder(nn::EncoderSpec{}, 12);
  nn::save_weights(small_model, dir / "small.oodw");
  nn::save_weights(full_model, dir / "full.oodw");

  json expected;
  expected["small"] = json::array();
  expected["full"] = json::array();
  for (int i = 0; i < 20; ++i) {
    sim::Scene s;
    if (i % 2 == 1) {
      s.obstacle = static_cast<sim::ObstacleKind>((i / 2) % sim::kObstacleKindCount);
      s.distance_m = 0.12 + 0.03 * i;
    }
    s.illumination = 0.9 + 0.01 * i;
    s.noise_seed = 5;
    s.frame_seq = static_cast<std::uint64_t>(i);
    const auto view = vision::detector_view(sim::render(s));
    const std::string name = fmt::format("img_{:02d}.ppm", i);
    vision::write_pnm(dir / name, view);
    expected["small"].push_back({{"image", name}, {"out", encode_json(small_model, view)}});
    if (i < 2) {
      expected["full"].push_back({{"image", name}, {"out", encode_json(full_model, view)}});
    }
  }
  std::ofstream(dir / "expected.json") << expected.dump(1) << "\n";
  return 0;
}

int cmd_encode(const fs::path & weights, const std::vector<fs::path> & images)
{
  const nn::Model model = nn::load_weights(weights);
  json out = json::array();
  for (const auto & p : images) {
    out.push_back(encode_json(model, vision::read_pnm(p)));
  }
  fmt::print("{}\n", out.dump());
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  try {
    const std::vector<std::string> args(argv + 1, argv + argc);
    if (args.size() == 2 && args[0] == "export") {
      return cmd_export(args[1]);
    }
    if (args.size() >= 3 && args[0] == "encode") {
      return cmd_encode(args[1], {args.begin() + 2, args.end()});
    }
    fmt::print(stderr, "usage: oodsim_fixture export DIR | encode WEIGHTS IMAGE...\n");
    return 1;
  } catch (const std::exception & e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
