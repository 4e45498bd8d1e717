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

#include "oodsim/nn/weights_io.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "oodsim/core/error.hpp"

namespace oodsim::nn
{
namespace
{

constexpr char kMagic[4] = {'O', 'O', 'D', 'W'};

class Writer
{
public:
  void bytes(const char * p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i) {
      out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void array(const Tensor & t)
  {
    u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) {
      u32(static_cast<std::uint32_t>(d));
    }
    for (float v : t.data()) {
      f32(v);
    }
  }
  void scalars(std::initializer_list<float> values)
  {
    array(Tensor({values.size()}, std::vector<float>(values)));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

private:
  std::vector<std::uint8_t> out_;
};

class Reader
{
public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == in_.size(); }

  void need(std::size_t n, std::string_view what) const
  {
    if (in_.size() - pos_ < n) {
      throw FormatError(fmt::format(
        "weight file truncated at byte {} while reading {} ({} bytes needed, {} left)", pos_,
        what, n, in_.size() - pos_));
    }
  }
  std::uint8_t u8(std::string_view what)
  {
    need(1, what);
    return in_[pos_++];
  }
  std::uint32_t u32(std::string_view what)
  {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    }
    return v;
  }
  Tensor array(std::string_view what)
  {
    const std::uint32_t rank = u32(what);
    if (rank == 0 || rank > 8) {
      throw FormatError(fmt::format("{} has unsupported rank {}", what, rank));
    }
    Tensor::Shape shape(rank);
    std::uint64_t count = 1;
    for (auto & d : shape) {
      d = u32(what);
      count *= d;
    }
    if (count > (in_.size() - pos_) / 4) {
      throw FormatError(fmt::format(
        "{} declares shape {} ({} values) but only {} bytes remain", what, to_string(shape), count,
        in_.size() - pos_));
    }
    std::vector<float> data(count);
    for (auto & v : data) {
      v = std::bit_cast<float>(u32(what));
    }
    return Tensor(std::move(shape), std::move(data));
  }

private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void expect_shape(const Tensor & t, const Tensor::Shape & expected, std::string_view what)
{
  if (t.shape() != expected) {
    throw ShapeError(fmt::format(
      "{} stored with shape {} but layer requires {}", what, to_string(t.shape()),
      to_string(expected)));
  }
}

void expect_rank(const Tensor & t, std::size_t rank, std::string_view what)
{
  if (t.rank() != rank) {
    throw ShapeError(
      fmt::format("{} stored with rank {} but layer requires rank {}", what, t.rank(), rank));
  }
}

int integral_hyper(float v, std::string_view what)
{
  if (!std::isfinite(v) || v != std::floor(v) || v < 0.0f || v > 1.0e6f) {
    throw FormatError(fmt::format("conv2d {} value {} is not a small non-negative integer", what, v));
  }
  return static_cast<int>(v);
}

Layer read_layer(Reader & r, std::size_t index)
{
  const std::uint8_t tag = r.u8("layer tag");
  const auto what = [&](std::string_view name) { return fmt::format("layer {} {}", index, name); };
  switch (static_cast<LayerTag>(tag)) {
    case LayerTag::kConv2D: {
      Conv2D c;
      c.kernels = r.array(what("kernels"));
      expect_rank(c.kernels, 4, what("kernels"));
      c.bias = r.array(what("bias"));
      expect_shape(c.bias, {c.kernels.dim(0)}, what("bias"));
      const Tensor hyper = r.array(what("hyper"));
      expect_shape(hyper, {2}, what("hyper"));
      c.stride = integral_hyper(hyper[0], "stride");
      c.padding = integral_hyper(hyper[1], "padding");
      return c;
    }
    case LayerTag::kBatchNorm: {
      BatchNorm b;
      b.gamma = r.array(what("gamma"));
      expect_rank(b.gamma, 1, what("gamma"));
      b.beta = r.array(what("beta"));
      expect_shape(b.beta, b.gamma.shape(), what("beta"));
      b.running_mean = r.array(what("running_mean"));
      expect_shape(b.running_mean, b.gamma.shape(), what("running_mean"));
      b.running_var = r.array(what("running_var"));
      expect_shape(b.running_var, b.gamma.shape(), what("running_var"));
      const Tensor eps = r.array(what("eps"));
      expect_shape(eps, {1}, what("eps"));
      b.eps = eps[0];
      return b;
    }
    case LayerTag::kElu: {
      const Tensor alpha = r.array(what("alpha"));
      expect_shape(alpha, {1}, what("alpha"));
      return Elu{alpha[0]};
    }
    case LayerTag::kMaxPool2x2:
      return MaxPool2x2{};
    case LayerTag::kFlatten:
      return Flatten{};
    case LayerTag::kDense: {
      Dense d;
      d.weights = r.array(what("weights"));
      expect_rank(d.weights, 2, what("weights"));
      d.bias = r.array(what("bias"));
      expect_shape(d.bias, {d.weights.dim(0)}, what("bias"));
      return d;
    }
  }
  throw FormatError(fmt::format("layer {} has unknown type tag {}", index, tag));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError(fmt::format("cannot open weight file {}", path.string()));
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string trim(std::string s)
{
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::uint8_t> serialize_layers(const std::vector<Layer> & layers)
{
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kWeightFormatVersion);
  w.u32(static_cast<std::uint32_t>(layers.size()));
  for (const auto & layer : layers) {
    w.u8(static_cast<std::uint8_t>(tag_of(layer)));
    if (const auto * c = std::get_if<Conv2D>(&layer)) {
      w.array(c->kernels);
      w.array(c->bias);
      w.scalars({static_cast<float>(c->stride), static_cast<float>(c->padding)});
    } else if (const auto * b = std::get_if<BatchNorm>(&layer)) {
      w.array(b->gamma);
      w.array(b->beta);
      w.array(b->running_mean);
      w.array(b->running_var);
      w.scalars({b->eps});
    } else if (const auto * e = std::get_if<Elu>(&layer)) {
      w.scalars({e->alpha});
    } else if (const auto * d = std::get_if<Dense>(&layer)) {
      w.array(d->weights);
      w.array(d->bias);
    }
  }
  return w.take();
}

std::vector<Layer> parse_layers(std::span<const std::uint8_t> bytes)
{
  Reader r(bytes);
  r.need(sizeof(kMagic), "magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("weight file has bad magic (expected \"OODW\")");
  }
  for (std::size_t i = 0; i < sizeof(kMagic); ++i) {
    r.u8("magic");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kWeightFormatVersion) {
    throw FormatError(fmt::format(
      "weight file version {} is not supported (expected {})", version, kWeightFormatVersion));
  }
  const std::uint32_t count = r.u32("layer count");
  std::vector<Layer> layers;
  layers.reserve(std::min<std::uint32_t>(count, 1024));
  for (std::uint32_t i = 0; i < count; ++i) {
    layers.push_back(read_layer(r, i));
  }
  if (!r.at_end()) {
    throw FormatError(fmt::format(
      "weight file has {} trailing bytes after {} layers", bytes.size() - r.offset(), count));
  }
  return layers;
}

std::string format_manifest(const WeightManifest & manifest)
{
  return fmt::format(
    "format=OODW\nversion={}\ninput_shape={}\nlatent_dim={}\n", kWeightFormatVersion,
    fmt::join(manifest.input_shape, ","), manifest.latent_dim);
}

WeightManifest parse_manifest(const std::string & text)
{
  WeightManifest m;
  bool have_shape = false;
  bool have_dim = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(fmt::format("manifest line '{}' is not key=value", line));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "input_shape") {
        m.input_shape.clear();
        std::istringstream dims(value);
        std::string tok;
        while (std::getline(dims, tok, ',')) {
          m.input_shape.push_back(std::stoul(trim(tok)));
        }
        have_shape = true;
      } else if (key == "latent_dim") {
        m.latent_dim = std::stoul(value);
        have_dim = true;
      } else if (key == "version" && std::stoul(value) != kWeightFormatVersion) {
        throw FormatError(fmt::format("manifest version {} is not supported", value));
      }
    } catch (const std::logic_error &) {
      throw FormatError(fmt::format("manifest value for '{}' is malformed: '{}'", key, value));
    }
  }
  if (!have_shape || !have_dim) {
    throw FormatError("manifest must define input_shape and latent_dim");
  }
  return m;
}

std::filesystem::path manifest_path(const std::filesystem::path & weights)
{
  auto p = weights;
  p += ".manifest";
  return p;
}

Model load_weights(const std::filesystem::path & path)
{
  const auto bytes = read_file(path);
  auto layers = parse_layers(bytes);
  std::ifstream mf(manifest_path(path));
  if (!mf) {
    throw FormatError(fmt::format("missing manifest {}", manifest_path(path).string()));
  }
  std::stringstream text;
  text << mf.rdbuf();
  const auto manifest = parse_manifest(text.str());
  return Model(manifest.input_shape, manifest.latent_dim, std::move(layers));
}

void save_weights(const Model & model, const std::filesystem::path & path)
{
  const auto bytes = serialize_layers(model.layers());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw FormatError(fmt::format("cannot write weight file {}", path.string()));
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::ofstream mf(manifest_path(path), std::ios::trunc);
  mf << format_manifest({model.input_shape(), model.latent_dim()});
  if (!mf) {
    throw FormatError(fmt::format("cannot write manifest {}", manifest_path(path).string()));
  }
}

}  // namespace oodsim::nn
