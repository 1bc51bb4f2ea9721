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

#include <algorithm>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "gen.hpp"
#include "oracles.hpp"
#include "mtgan/error.hpp"
#include "mtgan/features.hpp"
#include "mtgan/sampler.hpp"

namespace mtgan {
namespace {

using testing::Gen;

FeatureSet LabelOnlyCorpus(const std::vector<int>& slices_per_speaker) {
  FeatureSet fs;
  for (std::size_t s = 0; s < slices_per_speaker.size(); ++s) {
    for (int u = 0; u < slices_per_speaker[s]; ++u) {
      FbankSlice slice;
      slice.frames = 2;
      slice.mels = 2;
      slice.data = {static_cast<float>(s), static_cast<float>(u), 0.0f, 1.0f};
      slice.speaker_id = "spk" + std::to_string(s);
      slice.utterance_id = slice.speaker_id + "_" + std::to_string(u);
      fs.Add(std::move(slice));
    }
  }
  return fs;
}

// Deterministic stand-in for an encoder: a fixed random unit vector per slice.
EmbedFn RandomEmbedding(std::size_t n_slices, int dim, std::uint64_t seed) {
  Gen gen(seed);
  auto table = std::make_shared<Tensor<float>>(gen.UnitRows<float>(
      static_cast<int>(n_slices), dim));
  return [table, dim](std::span<const std::size_t> idx) {
    Tensor<float> out({static_cast<int>(idx.size()), dim});
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto row = table->sample(static_cast<int>(idx[i]));
      std::copy(row.begin(), row.end(), out.sample(static_cast<int>(i)).begin());
    }
    return out;
  };
}

void ExpectValidTriples(const FeatureSet& fs, const std::vector<Triplet>& t) {
  for (const Triplet& x : t) {
    ASSERT_NE(x.anchor, x.positive);
    ASSERT_EQ(fs.label(x.anchor), fs.label(x.positive));
    ASSERT_NE(fs.label(x.anchor), fs.label(x.negative));
  }
}

TEST(EpochPairCount, Examples) {
  SamplingPlan p;
  p.speakers = 60;
  p.anchors = 2;
  p.positives = 2;
  p.other_classes = 5;
  p.negatives = 3;
  EXPECT_EQ(EpochPairCount(p), 3600u);
  p.speakers = 1252;
  EXPECT_EQ(EpochPairCount(p), 1252u * 60u);
  p.negatives = 0;
  EXPECT_THROW(EpochPairCount(p), ConfigError);
}

TEST(TripletSampler, MinimalPlanGivesTwoTriples) {
  const FeatureSet fs = LabelOnlyCorpus({3, 3, 3});
  SamplingPlan p;
  p.speakers = 2;
  p.anchors = 1;
  p.positives = 1;
  p.other_classes = 1;
  p.negatives = 1;
  const TripletSampler sampler(p, fs, 1);
  const auto epoch = sampler.SampleEpoch(0);
  EXPECT_EQ(epoch.triples.size(), 2u);
  ExpectValidTriples(fs, epoch.triples);
}

TEST(TripletSampler, LargeSpeakerCountRegime) {
  std::vector<int> counts(600, 2);
  const FeatureSet fs = LabelOnlyCorpus(counts);
  SamplingPlan p;
  p.speakers = 600;
  p.anchors = 1;
  p.positives = 1;
  p.other_classes = 1;
  p.negatives = 1;
  const TripletSampler sampler(p, fs, 2);
  EXPECT_EQ(sampler.SampleEpoch(0).triples.size(), 600u);
}

TEST(TripletSamplerProperty, LabelConstraintsOverManyDraws) {
  Gen gen(51);
  std::size_t drawn = 0;
  int round = 0;
  while (drawn < 10000) {
    std::vector<int> counts(gen.Int(2, 8));
    for (int& c : counts) c = gen.Int(2, 6);
    const FeatureSet fs = LabelOnlyCorpus(counts);
    SamplingPlan p;
    p.speakers = gen.Int(2, static_cast<int>(counts.size()));
    p.anchors = gen.Int(1, 4);
    p.positives = gen.Int(1, 3);
    p.other_classes = gen.Int(1, 4);
    p.negatives = gen.Int(1, 3);
    p.mode = gen.Bool() ? SamplingMode::kSemiHard : SamplingMode::kRandom;
    p.mining_batch = gen.Int(2, 64);
    const TripletSampler sampler(p, fs, gen.Int(0, 1000));
    const auto epoch = sampler.SampleEpoch(
        round++, RandomEmbedding(fs.size(), 5, gen.Int(0, 1000)));
    ASSERT_EQ(epoch.triples.size(), EpochPairCount(p));
    ExpectValidTriples(fs, epoch.triples);
    drawn += epoch.triples.size();
  }
}

TEST(TripletSampler, DeterministicPerSeedInBothModes) {
  const FeatureSet fs = LabelOnlyCorpus({4, 5, 3, 6});
  for (SamplingMode mode : {SamplingMode::kRandom, SamplingMode::kSemiHard}) {
    SamplingPlan p;
    p.mode = mode;
    const TripletSampler a(p, fs, 77);
    const TripletSampler b(p, fs, 77);
    const TripletSampler c(p, fs, 78);
    const auto embed = RandomEmbedding(fs.size(), 4, 3);
    EXPECT_EQ(a.SampleEpoch(3, embed).triples, b.SampleEpoch(3, embed).triples);
    EXPECT_NE(a.SampleEpoch(3, embed).triples, c.SampleEpoch(3, embed).triples);
    EXPECT_NE(a.SampleEpoch(3, embed).triples, a.SampleEpoch(4, embed).triples);
  }
}

TEST(TripletSampler, SkipsSpeakersWithOneSlice) {
  const FeatureSet fs = LabelOnlyCorpus({3, 1, 3});
  SamplingPlan p;
  const TripletSampler sampler(p, fs, 1);
  EXPECT_EQ(sampler.plan().speakers, 2);
  for (const Triplet& t : sampler.SampleEpoch(0).triples) {
    EXPECT_NE(fs.label(t.anchor), 1);
  }
}

TEST(TripletSampler, RejectsTooFewEligibleSpeakers) {
  EXPECT_THROW(TripletSampler(SamplingPlan{}, LabelOnlyCorpus({3, 1}), 1),
               ConfigError);
  SamplingPlan p;
  p.speakers = 4;
  EXPECT_THROW(TripletSampler(p, LabelOnlyCorpus({3, 3, 3}), 1), ConfigError);
}

TEST(TripletSampler, SemiHardNeedsEmbeddings) {
  SamplingPlan p;
  p.mode = SamplingMode::kSemiHard;
  const TripletSampler sampler(p, LabelOnlyCorpus({3, 3}), 1);
  EXPECT_THROW(sampler.SampleEpoch(0), ConfigError);
}

TEST(SelectSemiHard, InWindowWhenAvailable) {
  const std::vector<double> d = {0.9, 0.45, 0.35, 0.1};
  const auto pick = SelectSemiHard(d, 0.3, 0.2, 1);
  EXPECT_EQ(pick[0].candidate, 2u);
  EXPECT_FALSE(pick[0].fallback);
}

TEST(SelectSemiHard, FallbackWhenWindowEmpty) {
  const std::vector<double> d = {0.9, 0.1, 0.7};
  const auto pick = SelectSemiHard(d, 0.3, 0.2, 1);
  EXPECT_EQ(pick[0].candidate, 2u);
  EXPECT_TRUE(pick[0].fallback);
  const std::vector<double> all_close = {0.1, 0.25, 0.2};
  const auto far = SelectSemiHard(all_close, 0.3, 0.2, 1);
  EXPECT_EQ(far[0].candidate, 1u);
  EXPECT_TRUE(far[0].fallback);
}

TEST(SelectSemiHard, CyclesWhenMoreRequestedThanCandidates) {
  const std::vector<double> d = {0.5, 0.4};
  const auto pick = SelectSemiHard(d, 0.3, 0.3, 5);
  ASSERT_EQ(pick.size(), 5u);
  const std::vector<std::size_t> expect = {1, 0, 1, 0, 1};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(pick[i].candidate, expect[i]);
}

TEST(SelectSemiHard, TiesGoToLowerIndex) {
  const std::vector<double> d = {0.4, 0.4, 0.4};
  EXPECT_EQ(SelectSemiHard(d, 0.3, 0.2, 1)[0].candidate, 0u);
}

TEST(MineBatchProperty, MatchesBruteForceOracle) {
  Gen gen(52);
  for (int trial = 0; trial < 50; ++trial) {
    const auto b = testing::MakeRandomMiningBatch(gen, trial == 0 ? 32 : 64);
    const MinedBatch got = MineBatch(b.emb, b.labels, b.margin);
    const MinedBatch want = testing::OracleMineBatch(b.emb, b.labels, b.margin);
    EXPECT_EQ(got.triples, want.triples);
    EXPECT_EQ(got.fallback, want.fallback);
  }
}

TEST(SplitBatches, CoversAllInOrder) {
  std::vector<Triplet> t(10);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = {i, i + 1, i + 2};
  const auto b = SplitBatches(t, 4);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[2].size(), 2u);
  EXPECT_EQ(b[1][0].anchor, 4u);
  EXPECT_THROW(SplitBatches(t, 0), ConfigError);
}

}  // namespace
}  // namespace mtgan
