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
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "mtgan/error.hpp"
#include "mtgan/features.hpp"
#include "mtgan/inference.hpp"
#include "mtgan/sampler.hpp"
#include "mtgan/trainer.hpp"

namespace mtgan {
namespace {

namespace fs = std::filesystem;

FeatureSet ToyCorpus(std::uint64_t seed = 5, int speakers = 4, int side = 8) {
  SynthOptions so;
  so.n_speakers = speakers;
  so.utts_per_speaker = 5;
  so.frames = side;
  so.mels = side;
  so.seed = seed;
  return MakeSyntheticCorpus(so);
}

TrainConfig ToyConfig(std::uint64_t seed = 1) {
  TrainConfig c;
  c.net = testing::TinyNetConfig();
  c.plan.anchors = 2;
  c.plan.other_classes = 2;
  c.batch_triplets = 8;
  c.epochs = 2;
  c.seed = seed;
  return c;
}

std::vector<TrainBatch> Batches(const FeatureSet& features, std::size_t count,
                                const TrainConfig& c) {
  const TripletSampler sampler(c.plan, features, c.seed);
  std::vector<TrainBatch> out;
  for (int epoch = 0; out.size() < count; ++epoch) {
    const auto triples = sampler.SampleEpoch(epoch).triples;
    for (const auto& b : SplitBatches(triples, c.batch_triplets)) {
      if (out.size() == count) break;
      out.push_back(MakeBatch(features, b));
    }
  }
  return out;
}

std::vector<Tensor<float>> Snapshot(Network<float>& net) {
  std::vector<Tensor<float>> out;
  for (auto& p : net.Params()) out.push_back(*p.value);
  for (auto& b : net.Buffers()) out.push_back(*b.value);
  return out;
}

std::vector<Tensor<float>> Grads(Network<float>& net) {
  std::vector<Tensor<float>> out;
  for (auto& p : net.Params()) out.push_back(*p.grad);
  return out;
}

bool BitwiseEqual(const std::vector<Tensor<float>>& a,
                  const std::vector<Tensor<float>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) return false;
    if (std::memcmp(a[k].data(), b[k].data(), a[k].size() * sizeof(float))) {
      return false;
    }
  }
  return true;
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TrainerFiles : public ::testing::Test {
 protected:
  fs::path dir_;
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::path(MTGAN_TEST_TMPDIR) / "trainer_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
};

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor<float> w({3, 1}, std::vector<float>{1.0f, -2.0f, 0.5f});
  Tensor<float> g({3, 1}, std::vector<float>{0.3f, -4.0f, 0.0f});
  Adam adam({{"w", &w, &g}}, AdamOptions{0.01, 0.9, 0.999, 1e-8});
  adam.Step();
  EXPECT_EQ(adam.steps(), 1);
  EXPECT_NEAR(w[0], 0.99f, 1e-6);
  EXPECT_NEAR(w[1], -1.99f, 1e-6);
  EXPECT_EQ(w[2], 0.5f);
  adam.Step();
  EXPECT_NEAR(w[0], 0.98f, 1e-6);
}

TEST(MakeBatch, DeduplicatesSlicesInFirstSeenOrder) {
  const FeatureSet features = ToyCorpus();
  const std::vector<Triplet> triples = {{0, 1, 7}, {1, 0, 9}, {0, 2, 7}};
  const TrainBatch b = MakeBatch(features, triples);
  EXPECT_EQ(b.slices.shape().n, 5);
  EXPECT_EQ(b.triples[0], (Triplet{0, 1, 2}));
  EXPECT_EQ(b.triples[1], (Triplet{1, 0, 3}));
  EXPECT_EQ(b.triples[2], (Triplet{0, 4, 2}));
  EXPECT_EQ(b.labels[2], features.label(7));
  EXPECT_THROW(MakeBatch(features, {}), ShapeError);
}

TEST(Trainer, RejectsSingleSpeakerAndBadConfig) {
  EXPECT_THROW(Trainer(ToyConfig(), 1), ConfigError);
  TrainConfig c = ToyConfig();
  c.use_gan = c.use_softmax = c.use_triplet = false;
  EXPECT_THROW(Trainer(c, 4), ConfigError);
}

TEST(Trainer, DisabledGroupsStayBitwiseUnchanged) {
  const FeatureSet features = ToyCorpus();
  const TrainConfig base = ToyConfig();
  const auto batches = Batches(features, 10, base);

  TrainConfig no_gan = base;
  no_gan.use_gan = false;
  Trainer a(no_gan, features.num_classes());
  const auto critic0 = Snapshot(a.nets().critic);
  const auto gen0 = Snapshot(a.nets().generator);
  const auto enc0 = Snapshot(a.nets().encoder);
  for (const auto& b : batches) a.TrainStep(b);
  EXPECT_TRUE(BitwiseEqual(Snapshot(a.nets().critic), critic0));
  EXPECT_TRUE(BitwiseEqual(Snapshot(a.nets().generator), gen0));
  EXPECT_FALSE(BitwiseEqual(Snapshot(a.nets().encoder), enc0));

  TrainConfig no_softmax = base;
  no_softmax.use_softmax = false;
  Trainer s(no_softmax, features.num_classes());
  const auto cls0 = Snapshot(s.nets().classifier);
  const auto critic1 = Snapshot(s.nets().critic);
  for (const auto& b : batches) s.TrainStep(b);
  EXPECT_TRUE(BitwiseEqual(Snapshot(s.nets().classifier), cls0));
  EXPECT_FALSE(BitwiseEqual(Snapshot(s.nets().critic), critic1));
  EXPECT_EQ(s.state().history.back().softmax, 0.0);
}

TEST(Trainer, TripletOffEqualsZeroTripletWeight) {
  const FeatureSet features = ToyCorpus();
  TrainConfig off = ToyConfig();
  off.use_triplet = false;
  TrainConfig zero = ToyConfig();
  zero.weights.triplet = 0.0;
  Trainer a(off, features.num_classes());
  Trainer b(zero, features.num_classes());
  for (const auto& batch : Batches(features, 10, off)) {
    a.TrainStep(batch);
    b.TrainStep(batch);
  }
  EXPECT_TRUE(BitwiseEqual(Snapshot(a.nets().encoder),
                           Snapshot(b.nets().encoder)));
  EXPECT_TRUE(BitwiseEqual(Snapshot(a.nets().generator),
                           Snapshot(b.nets().generator)));
  EXPECT_TRUE(BitwiseEqual(Snapshot(a.nets().classifier),
                           Snapshot(b.nets().classifier)));
  EXPECT_EQ(a.state().history.back().triplet, 0.0);
}

// Encoder gradients of the separate objectives add up to the joint one, and
// with the triplet term off only the softmax gradient remains.
TEST(Trainer, EncoderGradientDecomposes) {
  const FeatureSet features = ToyCorpus();
  TrainConfig both = ToyConfig();
  both.use_gan = false;
  const TrainBatch batch = Batches(features, 1, both).front();
  auto grads_for = [&](bool triplet, bool softmax) {
    TrainConfig c = both;
    c.use_triplet = triplet;
    c.use_softmax = softmax;
    Trainer t(c, features.num_classes());
    t.TrainStep(batch);
    return Grads(t.nets().encoder);
  };
  const auto joint = grads_for(true, true);
  const auto triplet_only = grads_for(true, false);
  const auto softmax_only = grads_for(false, true);
  double softmax_norm = 0.0;
  for (std::size_t k = 0; k < joint.size(); ++k) {
    for (std::size_t i = 0; i < joint[k].size(); ++i) {
      EXPECT_NEAR(joint[k][i], triplet_only[k][i] + softmax_only[k][i],
                  1e-6 + 1e-4 * std::abs(joint[k][i]));
      softmax_norm += std::abs(softmax_only[k][i]);
    }
  }
  EXPECT_GT(softmax_norm, 0.0);
}

TEST(Trainer, SameSeedSameTrajectory) {
  const FeatureSet features = ToyCorpus();
  const auto batches = Batches(features, 5, ToyConfig());
  Trainer a(ToyConfig(), features.num_classes());
  Trainer b(ToyConfig(), features.num_classes());
  Trainer c(ToyConfig(2), features.num_classes());
  for (const auto& batch : batches) {
    EXPECT_EQ(a.TrainStep(batch), b.TrainStep(batch));
    c.TrainStep(batch);
  }
  EXPECT_NE(a.state().history.back(), c.state().history.back());
}

TEST(Trainer, NonFiniteLossAbortsBeforeUpdating) {
  const FeatureSet features = ToyCorpus();
  Trainer t(ToyConfig(), features.num_classes());
  auto params = t.nets().encoder.Params();
  (*params.back().value)[0] = std::numeric_limits<float>::quiet_NaN();
  const auto before = Snapshot(t.nets().critic);
  EXPECT_THROW(t.TrainStep(Batches(features, 1, ToyConfig()).front()),
               NumericError);
  EXPECT_TRUE(BitwiseEqual(Snapshot(t.nets().critic), before));
  EXPECT_TRUE(t.state().history.empty());
}

TEST_F(TrainerFiles, WritesMonotoneCsvAndCheckpoint) {
  const FeatureSet features = ToyCorpus();
  TrainConfig c = ToyConfig();
  c.dump_every = 1;
  c.dump_count = 3;
  Trainer t(c, features.num_classes());
  t.Train(features, dir_);
  EXPECT_TRUE(fs::exists(dir_ / "checkpoint.mtgc"));
  EXPECT_TRUE(fs::exists(dir_ / "fakes_epoch001.mtgf"));
  EXPECT_TRUE(fs::exists(dir_ / "fakes_epoch002.mtgf"));
  const FeatureFile fakes = LoadFeatures(dir_ / "fakes_epoch002.mtgf");
  EXPECT_EQ(fakes.kind, FeatureKind::kFake);
  EXPECT_EQ(fakes.features.size(), 3u);

  std::ifstream in(dir_ / "losses.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kLossCsvHeader);
  std::int64_t expect = 1;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::stoll(line.substr(0, line.find(','))), expect++);
  }
  EXPECT_EQ(expect - 1, t.state().step);
  EXPECT_EQ(static_cast<std::size_t>(t.state().step),
            t.state().history.size());
  EXPECT_EQ(t.state().epoch, 2);
}

TEST_F(TrainerFiles, RepeatedRunsGiveIdenticalCsv) {
  const FeatureSet features = ToyCorpus();
  for (const char* run : {"a", "b"}) {
    Trainer t(ToyConfig(), features.num_classes());
    t.Train(features, dir_ / run);
  }
  const std::string a = ReadFile(dir_ / "a" / "losses.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, ReadFile(dir_ / "b" / "losses.csv"));
}

TEST_F(TrainerFiles, ResumeBitMatchesUninterruptedRun) {
  const FeatureSet features = ToyCorpus();
  TrainConfig full = ToyConfig();
  full.epochs = 3;
  Trainer straight(full, features.num_classes());
  straight.Train(features, dir_ / "straight");

  TrainConfig first = full;
  first.epochs = 1;
  Trainer part(first, features.num_classes());
  part.Train(features, dir_ / "split");
  Trainer resumed = Trainer::Resume(dir_ / "split" / "checkpoint.mtgc", full);
  EXPECT_EQ(resumed.state().epoch, 1);
  resumed.Train(features, dir_ / "split");

  EXPECT_EQ(resumed.state().history, straight.state().history);
  EXPECT_EQ(ReadFile(dir_ / "split" / "losses.csv"),
            ReadFile(dir_ / "straight" / "losses.csv"));
  const Tensor<float> a = EncodeAll(straight.nets().encoder, features);
  const Tensor<float> b = EncodeAll(resumed.nets().encoder, features);
  EXPECT_TRUE(BitwiseEqual({a}, {b}));
}

TEST_F(TrainerFiles, CheckpointReloadRestoresForwardOutputs) {
  const FeatureSet features = ToyCorpus();
  Trainer t(ToyConfig(), features.num_classes());
  for (const auto& b : Batches(features, 3, ToyConfig())) t.TrainStep(b);
  t.SaveCheckpoint(dir_ / "c.mtgc");
  Trainer back = Trainer::LoadCheckpoint(dir_ / "c.mtgc");
  EXPECT_EQ(back.state().history, t.state().history);
  EXPECT_TRUE(BitwiseEqual(Snapshot(back.nets().critic),
                           Snapshot(t.nets().critic)));
  EXPECT_TRUE(BitwiseEqual({EncodeAll(back.nets().encoder, features)},
                           {EncodeAll(t.nets().encoder, features)}));
  EXPECT_EQ(ConfigToText(back.config()), ConfigToText(t.config()));
}

TEST_F(TrainerFiles, ResumeRejectsStructuralChanges) {
  const FeatureSet features = ToyCorpus();
  Trainer t(ToyConfig(), features.num_classes());
  t.SaveCheckpoint(dir_ / "c.mtgc");
  TrainConfig changed = ToyConfig();
  changed.margin = 0.5;
  try {
    Trainer::Resume(dir_ / "c.mtgc", changed);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("margin"), std::string::npos);
  }
}

TEST_F(TrainerFiles, CorruptCheckpointIsParseError) {
  const FeatureSet features = ToyCorpus();
  Trainer t(ToyConfig(), features.num_classes());
  t.SaveCheckpoint(dir_ / "c.mtgc");
  const std::string bytes = ReadFile(dir_ / "c.mtgc");
  std::ofstream(dir_ / "cut.mtgc", std::ios::binary)
      << bytes.substr(0, bytes.size() / 2);
  EXPECT_THROW(Trainer::LoadCheckpoint(dir_ / "cut.mtgc"), ParseError);
  std::ofstream(dir_ / "junk.mtgc", std::ios::binary) << "not a checkpoint";
  EXPECT_THROW(Trainer::LoadCheckpoint(dir_ / "junk.mtgc"), ParseError);
}

TEST_F(TrainerFiles, NanAbortNamesStepAndLastCheckpoint) {
  const FeatureSet features = ToyCorpus();
  TrainConfig one = ToyConfig();
  one.epochs = 1;
  Trainer t(one, features.num_classes());
  t.Train(features, dir_);
  Trainer resumed = Trainer::Resume(dir_ / "checkpoint.mtgc", ToyConfig());
  auto params = resumed.nets().encoder.Params();
  (*params.front().value)[0] = std::numeric_limits<float>::infinity();
  try {
    resumed.Train(features, dir_);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("step " + std::to_string(t.state().step + 1)),
              std::string::npos) << msg;
    EXPECT_NE(msg.find("checkpoint.mtgc"), std::string::npos) << msg;
  }
}

double EncoderLoss(const LossRecord& r, const TrainConfig& c) {
  return c.weights.triplet * r.triplet + c.weights.softmax * r.softmax;
}

TEST(TrainerConvergence, EncoderLossFallsOverTwoHundredSteps) {
  std::vector<double> first;
  std::vector<double> last;
  int above_chance = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const FeatureSet features = ToyCorpus(100 + seed, 6, 16);
    TrainConfig c = ToyConfig(seed);
    c.net.frames = 16;
    c.net.mels = 16;
    c.net.embed_dim = 16;
    c.net.encoder_channels = {4, 8};
    c.net.classifier_channels = {4, 8};
    Trainer t(c, features.num_classes());
    for (const auto& b : Batches(features, 200, c)) t.TrainStep(b);
    first.push_back(EncoderLoss(t.state().history.front(), c));
    last.push_back(EncoderLoss(t.state().history.back(), c));

    // Classifier top-1 on the real training slices.
    std::vector<std::size_t> all(features.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const Tensor<float> logits = t.nets().classifier.Forward(
        SlicesToTensor(features, all), Mode::kInfer);
    int correct = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      const auto row = logits.sample(static_cast<int>(i));
      const auto best = std::max_element(row.begin(), row.end()) - row.begin();
      if (best == features.label(i)) ++correct;
    }
    if (correct * features.num_classes() > static_cast<int>(all.size())) {
      ++above_chance;
    }
  }
  std::sort(first.begin(), first.end());
  std::sort(last.begin(), last.end());
  EXPECT_LT(last[2], first[2]);
  EXPECT_GE(above_chance, 3);
}

}  // namespace
}  // namespace mtgan
