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

#ifndef MTGAN_FEATURES_HPP_
#define MTGAN_FEATURES_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mtgan {

struct Utterance {
  std::vector<float> samples;  // mono, in [-1, 1]
  int sample_rate = 16000;
  std::string speaker_id;
  std::string utterance_id;
};

struct FbankOptions {
  int sample_rate = 16000;
  double slice_seconds = 2.0;
  double hop_seconds = 2.0;  // between consecutive slices of one utterance
  double window_ms = 25.0;
  int n_mels = 128;
  int n_frames = 128;
  int fft_size = 1024;
  double low_freq = 0.0;
  double high_freq = 0.0;  // <= 0 means Nyquist
  double log_floor = 1e-10;
};

/// One normalized frames x mels log-mel matrix, row-major by frame.
struct FbankSlice {
  int frames = 0;
  int mels = 0;
  std::vector<float> data;
  std::string speaker_id;
  std::string utterance_id;
  int slice_index = 0;

  float at(int frame, int mel) const { return data[frame * mels + mel]; }
};

/// Slices plus a dense speaker index (labels 0..C-1 in first-seen order).
class FeatureSet {
 public:
  void Add(FbankSlice slice);

  const std::vector<FbankSlice>& slices() const { return slices_; }
  const FbankSlice& slice(std::size_t i) const { return slices_[i]; }
  std::size_t size() const { return slices_.size(); }
  bool empty() const { return slices_.empty(); }

  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  int num_classes() const { return static_cast<int>(speakers_.size()); }
  const std::vector<std::string>& speakers() const { return speakers_; }
  /// Throws std::out_of_range for unknown speakers.
  int LabelOf(const std::string& speaker_id) const;

  /// Slice indices grouped by label.
  std::vector<std::vector<std::size_t>> IndicesByLabel() const;

  /// Slices whose speaker appears in `speaker_ids`, relabeled densely in the
  /// order given.
  FeatureSet SelectSpeakers(const std::vector<std::string>& speaker_ids) const;

  /// Splits off the last `holdout` speakers (by label) as an evaluation set.
  std::pair<FeatureSet, FeatureSet> SplitHoldout(int holdout) const;

 private:
  std::vector<FbankSlice> slices_;
  std::vector<int> labels_;
  std::vector<std::string> speakers_;
  std::map<std::string, int> index_;
};

/// Consecutive windows of slice_seconds every hop_seconds; the trailing
/// remainder shorter than one slice is dropped.
std::vector<std::vector<float>> SliceUtterance(const Utterance& utt,
                                               double slice_seconds,
                                               double hop_seconds);

/// Triangular mel filterbank on the one-sided power spectrum.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FbankOptions& opts);

  static double HzToMel(double hz);
  static double MelToHz(double mel);

  int num_bins() const { return static_cast<int>(weights_.size()); }
  double center_hz(int bin) const { return centers_hz_[bin]; }
  /// Writes num_bins() energies for a power spectrum of fft_size/2+1 points.
  void Apply(std::span<const double> power, std::span<double> energies) const;

 private:
  struct Band {
    int first = 0;
    std::vector<double> weights;
  };
  std::vector<Band> weights_;
  std::vector<double> centers_hz_;
};

/// Log-mel matrix of one slice, framed to exactly n_frames rows and
/// normalized to zero mean and unit variance.
std::vector<float> ComputeFbank(std::span<const float> segment,
                                const FbankOptions& opts);

/// In-place zero-mean/unit-variance; divides by 1 when the std is below 1e-8.
void NormalizeSlice(std::span<float> matrix);

/// Slices and featurizes utterances (in the given order) into a FeatureSet.
FeatureSet ExtractFeatures(const std::vector<Utterance>& utterances,
                           const FbankOptions& opts);

struct SynthOptions {
  int n_speakers = 20;
  int utts_per_speaker = 10;
  std::uint64_t seed = 0;
  int frames = 128;
  int mels = 128;
  int formants = 4;
  double formant_jitter = 0.015;  // per-utterance center shift, fraction of mels
  double amplitude_jitter = 0.15;
  double content_gain = 1.0;      // speaker-independent phone patterns
  double noise_sd = 0.6;
};

/// Desk-scale stand-in for a speech corpus: each speaker owns a persistent
/// spectral envelope, every utterance renders that envelope under phonetic
/// content, energy modulation and noise. Deterministic per seed.
FeatureSet MakeSyntheticCorpus(const SynthOptions& opts);

enum class FeatureKind : std::uint16_t { kFeatures = 0, kFake = 1 };

struct FeatureFile {
  FeatureSet features;
  FeatureKind kind = FeatureKind::kFeatures;
};

std::vector<std::uint8_t> SerializeFeatures(
    const FeatureSet& fs, FeatureKind kind = FeatureKind::kFeatures);
FeatureFile DeserializeFeatures(std::span<const std::uint8_t> bytes);

void SaveFeatures(const std::filesystem::path& path, const FeatureSet& fs,
                  FeatureKind kind = FeatureKind::kFeatures);
FeatureFile LoadFeatures(const std::filesystem::path& path);

/// 16-bit PCM mono WAV. Stereo and other encodings are rejected.
Utterance ReadWav(const std::filesystem::path& path);
void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate);

}  // namespace mtgan

#endif  // MTGAN_FEATURES_HPP_
