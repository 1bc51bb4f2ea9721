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

#include "mtgan/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "json.hpp"

#include "binary_io.hpp"
#include "mtgan/error.hpp"

namespace mtgan {

namespace {

constexpr char kFeatureMagic[4] = {'M', 'T', 'G', 'F'};
constexpr std::uint16_t kFeatureVersion = 1;

}  // namespace

void FeatureSet::Add(FbankSlice slice) {
  auto it = index_.find(slice.speaker_id);
  int label;
  if (it == index_.end()) {
    label = static_cast<int>(speakers_.size());
    index_.emplace(slice.speaker_id, label);
    speakers_.push_back(slice.speaker_id);
  } else {
    label = it->second;
  }
  labels_.push_back(label);
  slices_.push_back(std::move(slice));
}

int FeatureSet::LabelOf(const std::string& speaker_id) const {
  auto it = index_.find(speaker_id);
  if (it == index_.end()) {
    throw std::out_of_range("unknown speaker " + speaker_id);
  }
  return it->second;
}

std::vector<std::vector<std::size_t>> FeatureSet::IndicesByLabel() const {
  std::vector<std::vector<std::size_t>> out(speakers_.size());
  for (std::size_t i = 0; i < slices_.size(); ++i) {
    out[labels_[i]].push_back(i);
  }
  return out;
}

FeatureSet FeatureSet::SelectSpeakers(
    const std::vector<std::string>& speaker_ids) const {
  FeatureSet out;
  for (const auto& id : speaker_ids) {
    const int label = LabelOf(id);
    for (std::size_t i = 0; i < slices_.size(); ++i) {
      if (labels_[i] == label) out.Add(slices_[i]);
    }
  }
  return out;
}

std::pair<FeatureSet, FeatureSet> FeatureSet::SplitHoldout(int holdout) const {
  const int c = num_classes();
  if (holdout < 0 || holdout >= c) {
    throw ConfigError("holdout of " + std::to_string(holdout) +
                      " speakers leaves no training speakers out of " +
                      std::to_string(c));
  }
  std::vector<std::string> train(speakers_.begin(),
                                 speakers_.end() - holdout);
  std::vector<std::string> held(speakers_.end() - holdout, speakers_.end());
  return {SelectSpeakers(train), SelectSpeakers(held)};
}

std::vector<std::vector<float>> SliceUtterance(const Utterance& utt,
                                               double slice_seconds,
                                               double hop_seconds) {
  if (!(slice_seconds > 0) || !(hop_seconds > 0)) {
    throw ConfigError("slice and hop durations must be positive");
  }
  if (utt.sample_rate <= 0) throw ConfigError("sample rate must be positive");
  std::vector<std::vector<float>> out;
  const auto slice = static_cast<std::size_t>(
      std::llround(slice_seconds * utt.sample_rate));
  const auto hop =
      static_cast<std::size_t>(std::llround(hop_seconds * utt.sample_rate));
  const std::size_t len = utt.samples.size();
  if (slice == 0 || hop == 0 || len < slice) return out;
  const std::size_t count = (len - slice) / hop + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto begin = utt.samples.begin() + static_cast<std::ptrdiff_t>(i * hop);
    out.emplace_back(begin, begin + static_cast<std::ptrdiff_t>(slice));
  }
  return out;
}

double MelFilterbank::HzToMel(double hz) {
  return 1127.0 * std::log(1.0 + hz / 700.0);
}

double MelFilterbank::MelToHz(double mel) {
  return 700.0 * (std::exp(mel / 1127.0) - 1.0);
}

MelFilterbank::MelFilterbank(const FbankOptions& opts) {
  const double nyquist = 0.5 * opts.sample_rate;
  const double high = opts.high_freq > 0 ? opts.high_freq : nyquist;
  if (opts.low_freq < 0 || high <= opts.low_freq || high > nyquist) {
    throw ConfigError("invalid mel frequency range");
  }
  if (opts.n_mels < 1 || opts.fft_size < 2) {
    throw ConfigError("invalid mel filterbank size");
  }
  const int n_fft_bins = opts.fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(opts.sample_rate) / opts.fft_size;
  const double mel_low = HzToMel(opts.low_freq);
  const double mel_high = HzToMel(high);
  const double delta = (mel_high - mel_low) / (opts.n_mels + 1);
  weights_.resize(opts.n_mels);
  centers_hz_.resize(opts.n_mels);
  for (int m = 0; m < opts.n_mels; ++m) {
    const double left = mel_low + m * delta;
    const double center = left + delta;
    const double right = center + delta;
    centers_hz_[m] = MelToHz(center);
    Band& band = weights_[m];
    band.first = -1;
    for (int k = 0; k < n_fft_bins; ++k) {
      const double mel = HzToMel(k * bin_hz);
      double w = 0.0;
      if (mel > left && mel <= center) {
        w = (mel - left) / (center - left);
      } else if (mel > center && mel < right) {
        w = (right - mel) / (right - center);
      }
      if (w > 0.0) {
        if (band.first < 0) band.first = k;
        band.weights.resize(k - band.first + 1, 0.0);
        band.weights[k - band.first] = w;
      }
    }
    if (band.first < 0) {
      throw ConfigError("mel bin " + std::to_string(m) +
                        " contains no FFT bins; increase fft_size");
    }
  }
}

void MelFilterbank::Apply(std::span<const double> power,
                          std::span<double> energies) const {
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    const Band& band = weights_[m];
    double e = 0.0;
    for (std::size_t j = 0; j < band.weights.size(); ++j) {
      e += band.weights[j] * power[band.first + j];
    }
    energies[m] = e;
  }
}

void NormalizeSlice(std::span<float> matrix) {
  if (matrix.empty()) return;
  double mean = 0.0;
  for (float v : matrix) mean += v;
  mean /= static_cast<double>(matrix.size());
  double var = 0.0;
  for (float v : matrix) var += (v - mean) * (v - mean);
  var /= static_cast<double>(matrix.size());
  double sd = std::sqrt(var);
  if (sd < 1e-8) sd = 1.0;
  for (float& v : matrix) v = static_cast<float>((v - mean) / sd);
}

std::vector<float> ComputeFbank(std::span<const float> segment,
                                const FbankOptions& opts) {
  const auto expected = static_cast<std::size_t>(
      std::llround(opts.slice_seconds * opts.sample_rate));
  if (segment.size() != expected) {
    throw ShapeError("fbank segment has " + std::to_string(segment.size()) +
                     " samples, expected " + std::to_string(expected));
  }
  const int window = static_cast<int>(
      std::llround(opts.window_ms * 1e-3 * opts.sample_rate));
  if (window > opts.fft_size) {
    throw ConfigError("analysis window longer than fft_size");
  }
  // hop = slice / n_frames so that exactly n_frames frames start inside the
  // slice; frames running past the end are zero-padded.
  const double hop = static_cast<double>(segment.size()) / opts.n_frames;

  std::vector<double> hamming(window);
  for (int i = 0; i < window; ++i) {
    hamming[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i /
                                        std::max(1, window - 1));
  }
  const MelFilterbank bank(opts);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(opts.fft_size);
  std::vector<std::complex<double>> spectrum;
  std::vector<double> power(opts.fft_size / 2 + 1);
  std::vector<double> energies(opts.n_mels);
  std::vector<float> out(static_cast<std::size_t>(opts.n_frames) * opts.n_mels);

  for (int f = 0; f < opts.n_frames; ++f) {
    const auto start = static_cast<std::size_t>(std::floor(f * hop));
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int i = 0; i < window; ++i) {
      const std::size_t idx = start + i;
      if (idx >= segment.size()) break;
      frame[i] = segment[idx] * hamming[i];
    }
    fft.fwd(spectrum, frame);
    for (std::size_t k = 0; k < power.size(); ++k) {
      power[k] = std::norm(spectrum[k]);
    }
    bank.Apply(power, energies);
    for (int m = 0; m < opts.n_mels; ++m) {
      out[static_cast<std::size_t>(f) * opts.n_mels + m] =
          static_cast<float>(std::log(std::max(energies[m], opts.log_floor)));
    }
  }
  NormalizeSlice(out);
  return out;
}

FeatureSet ExtractFeatures(const std::vector<Utterance>& utterances,
                           const FbankOptions& opts) {
  FeatureSet fs;
  for (const auto& utt : utterances) {
    if (utt.sample_rate != opts.sample_rate) {
      throw ConfigError("utterance " + utt.utterance_id + " has sample rate " +
                        std::to_string(utt.sample_rate) + ", expected " +
                        std::to_string(opts.sample_rate));
    }
    const auto segments =
        SliceUtterance(utt, opts.slice_seconds, opts.hop_seconds);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      FbankSlice s;
      s.frames = opts.n_frames;
      s.mels = opts.n_mels;
      s.data = ComputeFbank(segments[i], opts);
      s.speaker_id = utt.speaker_id;
      s.utterance_id = utt.utterance_id;
      s.slice_index = static_cast<int>(i);
      fs.Add(std::move(s));
    }
  }
  return fs;
}

namespace {

struct Formant {
  double center;
  double width;
  double amplitude;
};

std::mt19937_64 SeededRng(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::seed_seq seq{a, b, c};
  return std::mt19937_64(seq);
}

}  // namespace

FeatureSet MakeSyntheticCorpus(const SynthOptions& opts) {
  if (opts.n_speakers < 2) {
    throw ConfigError("synthetic corpus needs at least 2 speakers, got " +
                      std::to_string(opts.n_speakers));
  }
  if (opts.utts_per_speaker < 1 || opts.frames < 1 || opts.mels < 1) {
    throw ConfigError("synthetic corpus dimensions must be positive");
  }
  const int mels = opts.mels;
  const int frames = opts.frames;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Phone inventory shared by all speakers.
  constexpr int kPhones = 12;
  auto phone_rng = SeededRng(opts.seed, 0xF0AEull, 0);
  std::vector<std::vector<double>> phones(kPhones, std::vector<double>(mels));
  for (auto& p : phones) {
    for (int band = 0; band < 3; ++band) {
      const double c = unit(phone_rng) * mels;
      const double w = (0.03 + 0.07 * unit(phone_rng)) * mels;
      const double a = 0.4 + 0.8 * unit(phone_rng);
      for (int m = 0; m < mels; ++m) {
        const double z = (m - c) / w;
        p[m] += a * std::exp(-0.5 * z * z);
      }
    }
  }

  FeatureSet fs;
  for (int s = 0; s < opts.n_speakers; ++s) {
    auto spk_rng = SeededRng(opts.seed, 1, static_cast<std::uint64_t>(s));
    std::vector<Formant> formants(opts.formants);
    for (auto& f : formants) {
      f.center = (0.05 + 0.85 * unit(spk_rng)) * mels;
      f.width = (0.02 + 0.06 * unit(spk_rng)) * mels;
      f.amplitude = 0.5 + unit(spk_rng);
    }
    const double tilt = 2.0 * unit(spk_rng) - 1.0;
    const double ripple_period = 6.0 + 8.0 * unit(spk_rng);
    const double ripple_phase = 2.0 * std::numbers::pi * unit(spk_rng);
    const double ripple_amp = 0.2 + 0.3 * unit(spk_rng);
    const std::string speaker_id = "spk" + std::to_string(s);

    for (int u = 0; u < opts.utts_per_speaker; ++u) {
      auto rng = SeededRng(opts.seed, 2 + static_cast<std::uint64_t>(s),
                           static_cast<std::uint64_t>(u));
      std::vector<double> envelope(mels, 0.0);
      for (const auto& f : formants) {
        const double c = f.center + opts.formant_jitter * mels * gauss(rng);
        const double a = f.amplitude * (1.0 + opts.amplitude_jitter * gauss(rng));
        for (int m = 0; m < mels; ++m) {
          const double z = (m - c) / f.width;
          envelope[m] += a * std::exp(-0.5 * z * z);
        }
      }
      for (int m = 0; m < mels; ++m) {
        envelope[m] += tilt * m / mels +
                       ripple_amp * std::cos(2.0 * std::numbers::pi * m /
                                                 ripple_period +
                                             ripple_phase);
      }

      // Phone sequence with segment durations of 8..24 frames, and a slow
      // syllabic energy contour.
      std::vector<int> phone_of_frame(frames);
      for (int f = 0; f < frames;) {
        const int phone = static_cast<int>(unit(rng) * kPhones) % kPhones;
        const int dur = 8 + static_cast<int>(unit(rng) * 17);
        for (int k = 0; k < dur && f < frames; ++k, ++f) {
          phone_of_frame[f] = phone;
        }
      }
      const double energy_rate = 0.05 + 0.1 * unit(rng);
      const double energy_phase = 2.0 * std::numbers::pi * unit(rng);

      FbankSlice slice;
      slice.frames = frames;
      slice.mels = mels;
      slice.data.resize(static_cast<std::size_t>(frames) * mels);
      slice.speaker_id = speaker_id;
      slice.utterance_id = speaker_id + "_utt" + std::to_string(u);
      slice.slice_index = 0;
      for (int f = 0; f < frames; ++f) {
        const double energy = 0.5 * std::sin(energy_rate * f + energy_phase);
        const auto& phone = phones[phone_of_frame[f]];
        for (int m = 0; m < mels; ++m) {
          const double v = envelope[m] + opts.content_gain * phone[m] +
                           energy + opts.noise_sd * gauss(rng);
          slice.data[static_cast<std::size_t>(f) * mels + m] =
              static_cast<float>(v);
        }
      }
      NormalizeSlice(slice.data);
      fs.Add(std::move(slice));
    }
  }
  return fs;
}

std::vector<std::uint8_t> SerializeFeatures(const FeatureSet& fs,
                                            FeatureKind kind) {
  io::ByteWriter w;
  for (char c : kFeatureMagic) w.Put(c);
  w.Put<std::uint16_t>(kFeatureVersion);
  w.Put<std::uint16_t>(static_cast<std::uint16_t>(kind));
  const int frames = fs.empty() ? 0 : fs.slice(0).frames;
  const int mels = fs.empty() ? 0 : fs.slice(0).mels;
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(fs.size()));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(frames));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(mels));
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : fs.slices()) {
    if (s.frames != frames || s.mels != mels ||
        s.data.size() != static_cast<std::size_t>(frames) * mels) {
      throw ShapeError("feature set mixes matrix shapes");
    }
    w.PutFloats(s.data);
    slices.push_back(
        {{"speaker", s.speaker_id}, {"utterance", s.utterance_id},
         {"slice", s.slice_index}});
  }
  nlohmann::json index = {
      {"kind", kind == FeatureKind::kFake ? "fake" : "features"},
      {"speakers", fs.speakers()},
      {"slices", std::move(slices)}};
  w.PutString(index.dump());
  return std::move(w.bytes());
}

FeatureFile DeserializeFeatures(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes);
  for (char c : kFeatureMagic) {
    if (r.Get<char>("magic") != c) {
      throw ParseError("not a feature file (bad magic)", r.offset() - 1);
    }
  }
  const auto version = r.Get<std::uint16_t>("version");
  if (version != kFeatureVersion) {
    throw ParseError("unsupported feature file version " +
                         std::to_string(version),
                     r.offset() - 2);
  }
  const auto kind_raw = r.Get<std::uint16_t>("kind");
  if (kind_raw > 1) {
    throw ParseError("unknown feature kind " + std::to_string(kind_raw),
                     r.offset() - 2);
  }
  const auto count = r.Get<std::uint32_t>("slice count");
  const auto frames = r.Get<std::uint32_t>("frame count");
  const auto mels = r.Get<std::uint32_t>("mel count");
  const std::size_t per = static_cast<std::size_t>(frames) * mels;
  if (count > 0 && per == 0) {
    throw ParseError("zero-sized matrices with nonzero slice count",
                     r.offset());
  }
  if (count > 0 && per * sizeof(float) > r.remaining() / count) {
    throw ParseError("truncated matrix block: " + std::to_string(count) +
                         " matrices of " + std::to_string(per) +
                         " floats do not fit",
                     r.offset());
  }
  std::vector<std::vector<float>> matrices(count, std::vector<float>(per));
  for (auto& m : matrices) r.GetFloats(m, "matrix data");

  const auto index_offset = r.offset();
  const std::string text = r.GetString("metadata index");
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed metadata index: ") + e.what(),
                     index_offset + 8 + e.byte);
  }
  if (!r.AtEnd()) {
    throw ParseError("trailing bytes after metadata index", r.offset());
  }

  FeatureFile out;
  out.kind = static_cast<FeatureKind>(kind_raw);
  try {
    const auto& speakers = index.at("speakers");
    const auto& slices = index.at("slices");
    if (slices.size() != count) {
      throw ParseError("index lists " + std::to_string(slices.size()) +
                           " slices, header says " + std::to_string(count),
                       index_offset);
    }
    // Register speakers first so labels reproduce the saved order even when
    // slices are not grouped by speaker.
    std::map<std::string, int> order;
    for (std::size_t i = 0; i < speakers.size(); ++i) {
      order.emplace(speakers[i].get<std::string>(), static_cast<int>(i));
    }
    std::vector<FbankSlice> parsed(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      FbankSlice& s = parsed[i];
      s.frames = static_cast<int>(frames);
      s.mels = static_cast<int>(mels);
      s.data = std::move(matrices[i]);
      s.speaker_id = slices[i].at("speaker").get<std::string>();
      s.utterance_id = slices[i].at("utterance").get<std::string>();
      s.slice_index = slices[i].at("slice").get<int>();
      if (!order.contains(s.speaker_id)) {
        throw ParseError("slice " + std::to_string(i) +
                             " names unindexed speaker " + s.speaker_id,
                         index_offset);
      }
    }
    FeatureSet fs;
    std::vector<std::size_t> first_of(speakers.size(), count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const int l = order.at(parsed[i].speaker_id);
      if (first_of[l] == count) first_of[l] = i;
    }
    // Speakers appear in first-seen order when saved; verify that holds so
    // FeatureSet::Add assigns identical labels.
    for (std::size_t l = 1; l < first_of.size(); ++l) {
      if (first_of[l] < first_of[l - 1]) {
        throw ParseError("speaker index order disagrees with slice order",
                         index_offset);
      }
    }
    for (auto& s : parsed) fs.Add(std::move(s));
    if (fs.num_classes() != static_cast<int>(speakers.size())) {
      throw ParseError("speaker index lists speakers without slices",
                       index_offset);
    }
    out.features = std::move(fs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid metadata index: ") + e.what(),
                     index_offset);
  }
  return out;
}

void SaveFeatures(const std::filesystem::path& path, const FeatureSet& fs,
                  FeatureKind kind) {
  io::WriteFileAtomic(path, SerializeFeatures(fs, kind));
}

FeatureFile LoadFeatures(const std::filesystem::path& path) {
  const auto bytes = io::ReadFile(path);
  return DeserializeFeatures(bytes);
}

namespace {

std::uint32_t Tag(const char* s) {
  std::uint32_t v;
  std::memcpy(&v, s, 4);
  return v;
}

}  // namespace

Utterance ReadWav(const std::filesystem::path& path) {
  const auto bytes = io::ReadFile(path);
  io::ByteReader r(bytes);
  if (r.Get<std::uint32_t>("RIFF tag") != Tag("RIFF")) {
    throw ParseError("not a RIFF file: " + path.string(), 0);
  }
  r.Get<std::uint32_t>("RIFF size");
  if (r.Get<std::uint32_t>("WAVE tag") != Tag("WAVE")) {
    throw ParseError("not a WAVE file: " + path.string(), 8);
  }
  Utterance utt;
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  while (!r.AtEnd()) {
    const auto chunk_offset = r.offset();
    const auto id = r.Get<std::uint32_t>("chunk id");
    const auto size = r.Get<std::uint32_t>("chunk size");
    if (id == Tag("fmt ")) {
      auto body = r.GetBytes(size, "fmt chunk");
      io::ByteReader f(body);
      const auto format = f.Get<std::uint16_t>("audio format");
      channels = f.Get<std::uint16_t>("channel count");
      utt.sample_rate = static_cast<int>(f.Get<std::uint32_t>("sample rate"));
      f.Get<std::uint32_t>("byte rate");
      f.Get<std::uint16_t>("block align");
      bits = f.Get<std::uint16_t>("bits per sample");
      if (format != 1) {
        throw ParseError("only PCM WAV is supported: " + path.string(),
                         chunk_offset);
      }
      if (channels != 1) {
        throw ParseError((channels == 2 ? std::string("stereo WAV rejected")
                                        : std::to_string(channels) +
                                              "-channel WAV rejected") +
                             ", mono required: " + path.string(),
                         chunk_offset);
      }
      if (bits != 16) {
        throw ParseError("WAV must be 16-bit, got " + std::to_string(bits) +
                             " bits: " + path.string(),
                         chunk_offset);
      }
      have_fmt = true;
    } else if (id == Tag("data")) {
      if (!have_fmt) {
        throw ParseError("data chunk before fmt chunk", chunk_offset);
      }
      auto body = r.GetBytes(size, "data chunk");
      utt.samples.resize(size / 2);
      for (std::size_t i = 0; i < utt.samples.size(); ++i) {
        std::int16_t v;
        std::memcpy(&v, body.data() + 2 * i, 2);
        utt.samples[i] = static_cast<float>(v) / 32768.0f;
      }
      if (size % 2 == 1 && !r.AtEnd()) r.Get<std::uint8_t>("pad byte");
      return utt;
    } else {
      r.GetBytes(size + (size % 2), "chunk body");
    }
  }
  throw ParseError("WAV has no data chunk: " + path.string(), r.offset());
}

void WriteWav(const std::filesystem::path& path, std::span<const float> samples,
              int sample_rate) {
  io::ByteWriter w;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  w.Put(Tag("RIFF"));
  w.Put<std::uint32_t>(36 + data_bytes);
  w.Put(Tag("WAVE"));
  w.Put(Tag("fmt "));
  w.Put<std::uint32_t>(16);
  w.Put<std::uint16_t>(1);
  w.Put<std::uint16_t>(1);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(sample_rate) * 2);
  w.Put<std::uint16_t>(2);
  w.Put<std::uint16_t>(16);
  w.Put(Tag("data"));
  w.Put<std::uint32_t>(data_bytes);
  for (float s : samples) {
    const float c = std::clamp(s, -1.0f, 1.0f);
    w.Put(static_cast<std::int16_t>(std::lrint(c * 32767.0f)));
  }
  io::WriteFileAtomic(path, w.bytes());
}

}  // namespace mtgan
