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

#include "oodsim/ood/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "oodsim/core/error.hpp"

namespace oodsim::ood
{

void DetectorConfig::validate() const
{
  if (latent_dim == 0) {
    throw ValidationError("detector latent dimension must be >= 1");
  }
  if (subset.empty()) {
    throw ValidationError("detector subset is empty");
  }
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] >= latent_dim) {
      throw ValidationError(fmt::format("detector index {} out of range for D = {}", subset[i], latent_dim));
    }
    if (i > 0 && subset[i] <= subset[i - 1]) {
      throw ValidationError("detector subset must be strictly ascending");
    }
  }
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw ValidationError(fmt::format("detector threshold must be finite and >= 0, got {}", threshold));
  }
}

std::vector<double> kl_per_dim(const nn::LatentStats & stats)
{
  if (stats.mu.size() != stats.logvar.size()) {
    throw ValidationError(fmt::format(
      "latent stats have {} means but {} log-variances", stats.mu.size(), stats.logvar.size()));
  }
  std::vector<double> kl(stats.mu.size());
  for (std::size_t i = 0; i < kl.size(); ++i) {
    const double mu = stats.mu[i];
    const double lv = stats.logvar[i];
    if (!std::isfinite(mu) || !std::isfinite(lv)) {
      throw NumericError(fmt::format("latent dimension {} is not finite (mu {}, logvar {})", i, mu, lv));
    }
    const double var = std::exp(lv);
    if (!std::isfinite(var)) {
      throw NumericError(fmt::format("exp(logvar) overflows in latent dimension {} (logvar {})", i, lv));
    }
    // expm1 keeps exp(lv) - 1 - lv accurate near lv = 0.
    const double v = 0.5 * (mu * mu + (std::expm1(lv) - lv));
    kl[i] = v < 0.0 ? 0.0 : v;
  }
  return kl;
}

double ood_score(std::span<const double> kl, std::span<const std::size_t> subset)
{
  if (subset.empty()) {
    throw ValidationError("OOD score needs a non-empty latent subset");
  }
  double sum = 0.0;
  for (auto i : subset) {
    if (i >= kl.size()) {
      throw ValidationError(fmt::format("latent index {} out of range for {} dimensions", i, kl.size()));
    }
    sum += kl[i];
  }
  return sum;
}

void KlMatrix::append(std::span<const double> row)
{
  if (rows == 0 && cols == 0) {
    cols = row.size();
  }
  if (row.size() != cols) {
    throw ShapeError(fmt::format("KL row has {} entries, matrix has {} columns", row.size(), cols));
  }
  values.insert(values.end(), row.begin(), row.end());
  ++rows;
}

std::vector<std::size_t> select_detectors(const KlMatrix & calibration, std::size_t k)
{
  if (calibration.rows == 0 || calibration.cols == 0) {
    throw ValidationError("detector selection needs a non-empty calibration matrix");
  }
  if (k < 1 || k > calibration.cols) {
    throw ValidationError(fmt::format("detector count {} outside [1, {}]", k, calibration.cols));
  }
  std::vector<double> mean(calibration.cols, 0.0);
  for (std::size_t r = 0; r < calibration.rows; ++r) {
    for (std::size_t c = 0; c < calibration.cols; ++c) {
      mean[c] += calibration.at(r, c);
    }
  }
  for (auto & m : mean) {
    m /= static_cast<double>(calibration.rows);
  }
  std::vector<std::size_t> order(calibration.cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] > mean[b]; });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

double calibrate_threshold(std::span<const double> scores, double q)
{
  if (scores.empty()) {
    throw ValidationError("threshold calibration needs at least one score");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw ValidationError(fmt::format("quantile must be in (0, 1], got {}", q));
  }
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // Guard q*N landing a hair above an integer through rounding (0.8*620).
  const double pos = q * n;
  auto rank = static_cast<std::size_t>(std::ceil(pos - 1e-9 * std::max(1.0, pos)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Verdict classify(double score, double threshold)
{
  return score > threshold ? Verdict::kOutOfDistribution : Verdict::kInDistribution;
}

Verdict classify(double score, const DetectorConfig & config)
{
  return classify(score, config.threshold);
}

}  // namespace oodsim::ood
