// Copyright (c) 2026 The MTGAN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MTGAN_SAMPLER_HPP_
#define MTGAN_SAMPLER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mtgan/features.hpp"
#include "mtgan/losses.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

enum class SamplingMode { kRandom, kSemiHard };

/// Per-epoch triplet layout: n speakers, A anchors each, P positives per
/// anchor, K other classes per speaker, J negatives per other class.
struct SamplingPlan {
  int speakers = 0;  // n; 0 selects every eligible speaker
  int anchors = 2;
  int positives = 1;
  int other_classes = 2;
  int negatives = 1;
  SamplingMode mode = SamplingMode::kRandom;
  int mining_batch = 64;  // slices embedded per speaker when mining
};

/// n * A * P * K * J. Throws ConfigError when any count is below 1.
std::uint64_t EpochPairCount(const SamplingPlan& plan);

/// One selected negative, as a position in the candidate list.
struct MinedNegative {
  std::size_t candidate = 0;
  bool fallback = false;  // no candidate inside the semi-hard window
};

/// Picks `count` negatives from candidates at cosine distances `d_an` from the
/// anchor, given the anchor-positive distance `d_ap`. Candidates are ranked
///   1. inside the window d_ap < d < d_ap + margin, nearest first;
///   2. otherwise d >= d_ap, nearest first (flagged as fallback);
///   3. otherwise (all closer than the positive) farthest first (fallback);
/// ties go to the lower index. When count exceeds the candidates the ranking
/// repeats.
std::vector<MinedNegative> SelectSemiHard(std::span<const double> d_an,
                                          double d_ap, double margin,
                                          int count);

struct MinedBatch {
  std::vector<Triplet> triples;
  std::vector<bool> fallback;
};

/// Every ordered (anchor, positive) pair of equal labels inside one batch of
/// (N, D) unit embeddings gets one negative chosen by SelectSemiHard among
/// all rows with a different label.
MinedBatch MineBatch(const Tensor<float>& embeddings, std::span<const int> labels,
                     double margin);

/// Triples plus how many negatives came from the fallback path.
struct EpochTriples {
  std::vector<Triplet> triples;  // indices into the FeatureSet
  std::size_t fallbacks = 0;
};

/// Embeds the given FeatureSet slices, returning (len, D) unit rows.
using EmbedFn =
    std::function<Tensor<float>(std::span<const std::size_t> slice_indices)>;

class TripletSampler {
 public:
  /// Speakers with fewer than two slices are skipped with a warning; fewer
  /// than two eligible speakers, or n above the eligible count, is a
  /// ConfigError.
  TripletSampler(SamplingPlan plan, const FeatureSet& features,
                 std::uint64_t seed, Margin margin = Margin());

  /// Deterministic in (seed, epoch) and, for semi-hard mode, the embeddings
  /// returned by `embed`, which must be set in that mode.
  EpochTriples SampleEpoch(int epoch, const EmbedFn& embed = {}) const;

  std::uint64_t PairCount() const { return EpochPairCount(plan_); }
  const SamplingPlan& plan() const { return plan_; }

 private:
  SamplingPlan plan_;
  std::uint64_t seed_;
  Margin margin_;
  std::vector<std::vector<std::size_t>> by_label_;
  std::vector<int> eligible_;
};

/// Consecutive chunks of at most batch_size triples.
std::vector<std::vector<Triplet>> SplitBatches(std::span<const Triplet> triples,
                                               std::size_t batch_size);

}  // namespace mtgan

#endif  // MTGAN_SAMPLER_HPP_
