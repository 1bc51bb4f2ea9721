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

#ifndef MTGAN_CONFIG_HPP_
#define MTGAN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mtgan/losses.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/sampler.hpp"

namespace mtgan {

enum class GanObjective { kWassersteinGp, kLogLoss };

/// Every hyperparameter of a training run. Serialized as flat key=value text;
/// see ConfigKeys() for the accepted keys.
struct TrainConfig {
  NetConfig net;  // num_classes is filled in from the training data
  LossWeights weights;
  double margin = 0.2;
  Reduction triplet_reduction = Reduction::kSum;
  SamplingPlan plan;
  int batch_triplets = 16;
  int epochs = 10;
  std::uint64_t seed = 0;

  double lr_encoder = 1e-3;
  double lr_classifier = 1e-3;
  double lr_generator = 1e-4;
  double lr_critic = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adv_beta1 = 0.0;  // generator and critic
  double adv_beta2 = 0.9;
  double adam_eps = 1e-8;

  int g_steps_per_d_step = 2;
  GanObjective gan_objective = GanObjective::kWassersteinGp;
  double gp_lambda = 10.0;

  bool use_gan = true;
  bool use_softmax = true;
  bool use_triplet = true;

  int checkpoint_every = 1;  // epochs; 0 writes only the final checkpoint
  int dump_every = 0;        // epochs between fake-sample dumps; 0 disables
  int dump_count = 8;

  /// Throws ConfigError describing the first invalid field.
  void Validate() const;
};

/// Parses key=value lines; '#' starts a comment. Unknown keys and malformed
/// values raise ConfigError naming the key and line.
TrainConfig ParseConfig(const std::string& text);
TrainConfig LoadConfig(const std::filesystem::path& path);

/// Canonical text form: every key, fixed order, round-trips through
/// ParseConfig.
std::string ConfigToText(const TrainConfig& config);

const std::vector<std::string>& ConfigKeys();

/// Keys whose values differ between two configs, ignoring run-length and
/// output-cadence keys (epochs, checkpoint_every, dump_every, dump_count).
std::vector<std::string> StructuralDifferences(const TrainConfig& a,
                                               const TrainConfig& b);

}  // namespace mtgan

#endif  // MTGAN_CONFIG_HPP_
