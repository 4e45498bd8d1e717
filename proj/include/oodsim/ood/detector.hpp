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
#include <span>
#include <vector>

#include "oodsim/core/time.hpp"
#include "oodsim/nn/model.hpp"

namespace oodsim::ood
{

inline constexpr std::size_t kDefaultDetectorCount = 5;
inline constexpr double kDefaultQuantile = 0.8;

/// Latent subset, decision threshold and total latent dimension.
struct DetectorConfig
{
  std::vector<std::size_t> subset;
  double threshold = 0.0;
  std::size_t latent_dim = nn::kDefaultLatentDim;

  /// Throws ValidationError unless the subset is non-empty, sorted, unique,
  /// within [0, latent_dim) and the threshold is finite and >= 0.
  void validate() const;
};

enum class Verdict : std::uint8_t { kInDistribution, kOutOfDistribution };

struct OODResult
{
  std::uint64_t seq = 0;
  /// Per-dimension KL (empty for scorers without a latent space).
  std::vector<double> kl;
  double score = 0.0;
  bool flagged = false;
  Timestamp ingest{0};
  Timestamp complete{0};
};

/// 0.5 * (mu^2 + exp(logvar) - logvar - 1) per dimension, i.e. the KL
/// divergence of N(mu, exp(logvar)) from N(0, 1). Throws NumericError naming
/// the dimension when an input or the result is not finite.
std::vector<double> kl_per_dim(const nn::LatentStats & stats);

/// Sum of kl over the subset.
double ood_score(std::span<const double> kl, std::span<const std::size_t> subset);

/// Row-major N x D matrix of per-image KL vectors.
struct KlMatrix
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  void append(std::span<const double> row);
};

/// The k columns with the highest mean, ties to the lower index, returned
/// in ascending index order.
std::vector<std::size_t> select_detectors(const KlMatrix & calibration, std::size_t k);

/// Nearest-rank percentile: the ceil(q * N)-th smallest score (1-based).
double calibrate_threshold(std::span<const double> scores, double q);

/// Out-of-distribution iff score > threshold (strictly).
Verdict classify(double score, double threshold);
Verdict classify(double score, const DetectorConfig & config);

}  // namespace oodsim::ood
