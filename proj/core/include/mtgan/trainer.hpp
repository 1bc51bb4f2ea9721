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

#ifndef MTGAN_TRAINER_HPP_
#define MTGAN_TRAINER_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mtgan/config.hpp"
#include "mtgan/features.hpp"
#include "mtgan/losses.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/sampler.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over the parameters of one network. Moment estimates are kept in
/// parameter order and saved with checkpoints.
class Adam {
 public:
  Adam(std::vector<ParamRef<float>> params, AdamOptions options);

  void Step();
  std::int64_t steps() const { return t_; }

  std::vector<Tensor<float>>& first_moments() { return m_; }
  std::vector<Tensor<float>>& second_moments() { return v_; }
  void set_steps(std::int64_t t) { t_ = t; }

 private:
  std::vector<ParamRef<float>> params_;
  AdamOptions options_;
  std::vector<Tensor<float>> m_;
  std::vector<Tensor<float>> v_;
  std::int64_t t_ = 0;
};

struct LossRecord {
  std::int64_t step = 0;  // 1-based
  int epoch = 0;
  double triplet = 0.0;
  double softmax = 0.0;
  double generator = 0.0;
  double discriminator = 0.0;
  double total = 0.0;

  bool operator==(const LossRecord&) const = default;
};

struct TrainState {
  std::int64_t step = 0;
  int epoch = 0;  // completed epochs
  std::vector<LossRecord> history;
};

inline constexpr const char* kLossCsvHeader = "step,epoch,L_T,L_S,L_G,L_D,total";
std::string LossCsvRow(const LossRecord& r);

/// One optimization round's input: unique slices, their speaker labels, and
/// triplets indexing rows of that batch.
struct TrainBatch {
  Tensor<float> slices;
  std::vector<int> labels;
  std::vector<Triplet> triples;
};

/// Gathers the distinct slices referenced by FeatureSet-indexed triplets.
TrainBatch MakeBatch(const FeatureSet& features,
                     std::span<const Triplet> triples);

class Trainer {
 public:
  /// Fresh networks initialized from config.seed.
  Trainer(TrainConfig config, int num_classes);

  /// One round: encoder and classifier step, one critic step and
  /// g_steps_per_d_step generator steps. Groups switched off by the ablation
  /// flags are not updated. Throws NumericError on a non-finite loss, before
  /// any parameter changes.
  LossRecord TrainStep(const TrainBatch& batch);

  /// Runs the remaining epochs. With a nonempty out_dir writes losses.csv,
  /// checkpoint.mtgc at the configured cadence and at the end, and fake
  /// sample dumps fakes_epochNNN.mtgf.
  void Train(const FeatureSet& features, const std::filesystem::path& out_dir);

  /// Appends every sampled triple to a CSV (epoch,anchor,positive,negative
  /// as utterance_id#slice) during Train. An empty path disables the log.
  void set_triple_log(std::filesystem::path path) {
    triple_log_ = std::move(path);
  }

  void SaveCheckpoint(const std::filesystem::path& path) const;
  /// Restores a checkpoint written by SaveCheckpoint. `config` may differ
  /// from the stored one only in run-length and output-cadence keys.
  static Trainer LoadCheckpoint(const std::filesystem::path& path);
  static Trainer Resume(const std::filesystem::path& path,
                        const TrainConfig& config);

  NetworkSet<float>& nets() { return nets_; }
  const TrainState& state() const { return state_; }
  const TrainConfig& config() const { return config_; }
  int num_classes() const { return config_.net.num_classes; }

 private:
  void GeneratorSubstep(const Tensor<float>& embeddings,
                        std::span<const int> labels, std::mt19937_64& rng);
  Tensor<float> Noise(int n, std::mt19937_64& rng) const;
  void DumpFakes(const FeatureSet& features,
                 const std::filesystem::path& path);

  TrainConfig config_;
  NetworkSet<float> nets_;
  Adam opt_encoder_;
  Adam opt_generator_;
  Adam opt_critic_;
  Adam opt_classifier_;
  TrainState state_;
  std::filesystem::path triple_log_;
};

}  // namespace mtgan

#endif  // MTGAN_TRAINER_HPP_
