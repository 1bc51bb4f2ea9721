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

#ifndef MTGAN_EVALKIT_HPP_
#define MTGAN_EVALKIT_HPP_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mtgan/config.hpp"
#include "mtgan/features.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

struct SpeakerModel {
  std::string speaker_id;
  std::vector<float> centroid;  // unit norm
  int n_enroll = 0;
};

/// Centroid of the rows of an (N, D) embedding batch, renormalized.
SpeakerModel Enroll(const std::string& speaker_id,
                    const Tensor<float>& embeddings);

/// Cosine similarity in [-1, 1].
double ScoreTrial(const SpeakerModel& model, std::span<const float> test);

struct Trial {
  std::string model_id;
  std::string test_id;
  double score = 0.0;
  bool target = false;
};

struct TrialScoreSet {
  std::vector<Trial> trials;

  std::size_t targets() const;
  std::size_t nontargets() const { return trials.size() - targets(); }
};

struct TestItem {
  std::string test_id;
  std::string speaker_id;
  std::vector<float> embedding;
};

/// Every test item against every model.
TrialScoreSet BuildTrials(std::span<const SpeakerModel> models,
                          std::span<const TestItem> tests);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

/// Trials are accepted when score >= threshold. Thresholds run over the
/// distinct scores and +inf; the crossing of FAR and FRR is linearly
/// interpolated between neighbouring operating points. Throws
/// std::invalid_argument without both target and non-target trials.
EerResult ComputeEer(const TrialScoreSet& trials);

struct AccuracyResult {
  double accuracy = 0.0;
  double threshold = 0.0;  // lowest threshold reaching the maximum
};

AccuracyResult ComputeAccuracy(const TrialScoreSet& trials);

struct DetPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// Operating points by ascending threshold, from (FAR 1, FRR 0) to
/// (FAR 0, FRR 1). n_points > 1 keeps that many evenly spaced points
/// including both ends; 0 keeps every point.
std::vector<DetPoint> DetCurve(const TrialScoreSet& trials,
                               std::size_t n_points = 0);

void WriteTrialsCsv(const std::filesystem::path& path,
                    const TrialScoreSet& trials);
TrialScoreSet ReadTrialsCsv(const std::filesystem::path& path);
/// Writes far,frr rows and a gnuplot script next to them (same stem, .gp).
void WriteDetCsv(const std::filesystem::path& path,
                 std::span<const DetPoint> curve);

struct ProtocolOptions {
  int enroll = 3;
  int test = 7;
  std::uint64_t seed = 0;
};

struct ProtocolResult {
  std::vector<SpeakerModel> models;
  std::vector<TestItem> tests;
  TrialScoreSet trials;
  EerResult eer;
  AccuracyResult accuracy;
};

/// Per speaker, utterances are shuffled (seeded) and split into enrollment
/// and test utterances. A multi-slice utterance is represented by the
/// normalized mean of its slice embeddings.
ProtocolResult RunProtocol(EncoderNet<float>& encoder,
                           const FeatureSet& eval,
                           const ProtocolOptions& options);

struct ExperimentResult {
  std::string label;
  double eer = 0.0;
  double accuracy = 0.0;
  std::size_t trials = 0;
  double seconds = 0.0;
};

/// Trains on all but the last `holdout` speakers and evaluates on those.
ExperimentResult RunExperiment(const FeatureSet& corpus,
                               const TrainConfig& config, int holdout,
                               const ProtocolOptions& protocol,
                               const std::filesystem::path& out_dir = {},
                               const std::string& label = "MTGAN");

struct SweepRow {
  int dim = 0;
  double eer = 0.0;
  double accuracy = 0.0;
};

std::vector<SweepRow> EmbeddingDimSweep(const FeatureSet& corpus,
                                        std::span<const int> dims,
                                        const TrainConfig& config, int holdout,
                                        const ProtocolOptions& protocol);

/// One row per dropped component ("gan", "softmax", "triplet"), plus the
/// full model when with_full is set.
std::vector<ExperimentResult> Ablate(const FeatureSet& corpus,
                                     const TrainConfig& config,
                                     std::span<const std::string> drops,
                                     bool with_full, int holdout,
                                     const ProtocolOptions& protocol);

std::string PrintReport(std::span<const ExperimentResult> rows);
std::string PrintSweep(std::span<const SweepRow> rows);

}  // namespace mtgan

#endif  // MTGAN_EVALKIT_HPP_
