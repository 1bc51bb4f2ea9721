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

#include "mtgan/evalkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "binary_io.hpp"
#include "mtgan/error.hpp"
#include "mtgan/inference.hpp"
#include "mtgan/trainer.hpp"

namespace mtgan {

namespace {

std::vector<float> Normalized(std::vector<float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * x;
  const double norm = std::sqrt(ss);
  if (norm > 0.0) {
    for (float& x : v) x = static_cast<float>(x / norm);
  }
  return v;
}

std::vector<float> MeanRow(const Tensor<float>& rows) {
  const int n = rows.shape().n;
  const std::size_t d = rows.shape().per_sample();
  std::vector<double> acc(d, 0.0);
  for (int i = 0; i < n; ++i) {
    const auto r = rows.sample(i);
    for (std::size_t j = 0; j < d; ++j) acc[j] += r[j];
  }
  std::vector<float> out(d);
  for (std::size_t j = 0; j < d; ++j) out[j] = static_cast<float>(acc[j] / n);
  return out;
}

// Operating points at thresholds = distinct scores (ascending) then +inf.
std::vector<DetPoint> Sweep(const TrialScoreSet& set) {
  const std::size_t nt = set.targets();
  const std::size_t nn = set.nontargets();
  if (nt == 0 || nn == 0) {
    throw std::invalid_argument(
        "trial set needs both target and non-target trials (got " +
        std::to_string(nt) + " targets, " + std::to_string(nn) +
        " non-targets)");
  }
  std::vector<std::pair<double, bool>> s;
  s.reserve(set.trials.size());
  for (const Trial& t : set.trials) {
    if (!std::isfinite(t.score)) {
      throw NumericError("non-finite trial score for " + t.model_id + "/" +
                         t.test_id);
    }
    s.emplace_back(t.score, t.target);
  }
  std::sort(s.begin(), s.end());
  std::vector<DetPoint> out;
  std::size_t targets_below = 0;
  std::size_t nontargets_below = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const double thr = s[i].first;
    out.push_back({thr, static_cast<double>(nn - nontargets_below) / nn,
                   static_cast<double>(targets_below) / nt});
    while (i < s.size() && s[i].first == thr) {
      (s[i].second ? targets_below : nontargets_below) += 1;
      ++i;
    }
  }
  out.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  return out;
}

}  // namespace

SpeakerModel Enroll(const std::string& speaker_id,
                    const Tensor<float>& embeddings) {
  if (embeddings.shape().n < 1) {
    throw std::invalid_argument("enrollment of " + speaker_id +
                                " needs at least one embedding");
  }
  return {speaker_id, Normalized(MeanRow(embeddings)),
          embeddings.shape().n};
}

double ScoreTrial(const SpeakerModel& model, std::span<const float> test) {
  if (test.size() != model.centroid.size()) {
    throw ShapeError("test embedding has " + std::to_string(test.size()) +
                     " dims, model " + std::to_string(model.centroid.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    dot += static_cast<double>(model.centroid[i]) * test[i];
    na += static_cast<double>(model.centroid[i]) * model.centroid[i];
    nb += static_cast<double>(test[i]) * test[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::size_t TrialScoreSet::targets() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(),
                    [](const Trial& t) { return t.target; }));
}

TrialScoreSet BuildTrials(std::span<const SpeakerModel> models,
                          std::span<const TestItem> tests) {
  TrialScoreSet set;
  set.trials.reserve(models.size() * tests.size());
  for (const SpeakerModel& m : models) {
    for (const TestItem& t : tests) {
      set.trials.push_back({m.speaker_id, t.test_id,
                            ScoreTrial(m, t.embedding),
                            m.speaker_id == t.speaker_id});
    }
  }
  return set;
}

EerResult ComputeEer(const TrialScoreSet& trials) {
  const std::vector<DetPoint> pts = Sweep(trials);
  std::size_t k = 0;
  while (pts[k].far > pts[k].frr) ++k;  // terminates: last point has 0 < 1
  EerResult r;
  if (pts[k].far == pts[k].frr || k == 0) {
    r.eer = pts[k].far;
    r.threshold = pts[k].threshold;
  } else {
    const DetPoint& a = pts[k - 1];
    const DetPoint& b = pts[k];
    const double da = a.far - a.frr;
    const double db = b.far - b.frr;
    const double s = da / (da - db);
    r.eer = a.far + s * (b.far - a.far);
    r.threshold = std::isfinite(b.threshold)
                      ? a.threshold + s * (b.threshold - a.threshold)
                      : a.threshold;
  }
  if (r.eer > 0.5) {
    spdlog::warn("EER {:.4f} above 0.5; scores may be inverted", r.eer);
  }
  return r;
}

AccuracyResult ComputeAccuracy(const TrialScoreSet& trials) {
  if (trials.trials.empty()) {
    throw std::invalid_argument("accuracy of an empty trial set");
  }
  const std::size_t nt = trials.targets();
  const std::size_t nn = trials.nontargets();
  const double total = static_cast<double>(trials.trials.size());
  AccuracyResult best{-1.0, 0.0};
  if (nt == 0 || nn == 0) {
    // One class only: accept all (or reject all) is perfect.
    double lo = std::numeric_limits<double>::infinity();
    for (const Trial& t : trials.trials) lo = std::min(lo, t.score);
    return {1.0, nt > 0 ? lo : std::numeric_limits<double>::infinity()};
  }
  for (const DetPoint& p : Sweep(trials)) {
    const double correct = (1.0 - p.frr) * nt + (1.0 - p.far) * nn;
    const double acc = std::round(correct) / total;
    if (acc > best.accuracy) best = {acc, p.threshold};
  }
  return best;
}

std::vector<DetPoint> DetCurve(const TrialScoreSet& trials,
                               std::size_t n_points) {
  std::vector<DetPoint> pts = Sweep(trials);
  if (n_points == 0 || n_points >= pts.size()) return pts;
  if (n_points < 2) {
    throw std::invalid_argument("a DET curve needs at least 2 points");
  }
  std::vector<DetPoint> out;
  out.reserve(n_points);
  const double span = static_cast<double>(pts.size() - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const auto idx = static_cast<std::size_t>(
        std::llround(span * static_cast<double>(i) / (n_points - 1)));
    out.push_back(pts[idx]);
  }
  return out;
}

void WriteTrialsCsv(const std::filesystem::path& path,
                    const TrialScoreSet& trials) {
  std::string text = "model_id,test_id,score,target\n";
  for (const Trial& t : trials.trials) {
    text += fmt::format("{},{},{},{}\n", t.model_id, t.test_id, t.score,
                        t.target ? 1 : 0);
  }
  io::WriteTextAtomic(path, text);
}

TrialScoreSet ReadTrialsCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trial file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "model_id,test_id,score,target") {
    throw std::runtime_error(path.string() +
                             ": expected header model_id,test_id,score,target");
  }
  TrialScoreSet set;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string model;
    std::string test;
    std::string score;
    std::string target;
    if (!std::getline(ss, model, ',') || !std::getline(ss, test, ',') ||
        !std::getline(ss, score, ',') || !std::getline(ss, target)) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 4 fields");
    }
    Trial t;
    t.model_id = model;
    t.test_id = test;
    try {
      std::size_t used = 0;
      t.score = std::stod(score, &used);
      if (used != score.size()) throw std::invalid_argument(score);
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": bad score '" + score + "'");
    }
    if (target != "0" && target != "1") {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": target must be 0 or 1");
    }
    t.target = target == "1";
    set.trials.push_back(std::move(t));
  }
  return set;
}

void WriteDetCsv(const std::filesystem::path& path,
                 std::span<const DetPoint> curve) {
  std::string text = "far,frr\n";
  for (const DetPoint& p : curve) text += fmt::format("{},{}\n", p.far, p.frr);
  io::WriteTextAtomic(path, text);
  std::filesystem::path script = path;
  script.replace_extension(".gp");
  io::WriteTextAtomic(
      script,
      fmt::format("set datafile separator ','\n"
                  "set key off\n"
                  "set xlabel 'False accept rate'\n"
                  "set ylabel 'False reject rate'\n"
                  "set xrange [0:1]\n"
                  "set yrange [0:1]\n"
                  "plot '{}' using 1:2 every ::1 with lines\n",
                  path.filename().string()));
}

ProtocolResult RunProtocol(EncoderNet<float>& encoder, const FeatureSet& eval,
                           const ProtocolOptions& options) {
  if (options.enroll < 1 || options.test < 1) {
    throw ConfigError("protocol needs at least 1 enrollment and 1 test "
                      "utterance per speaker");
  }
  const Tensor<float> all = EncodeAll(encoder, eval);
  ProtocolResult out;
  const auto by_label = eval.IndicesByLabel();
  for (int label = 0; label < static_cast<int>(by_label.size()); ++label) {
    const std::string& speaker = eval.speakers()[label];
    // utterance id -> slice rows, in first-seen order
    std::vector<std::string> utts;
    std::map<std::string, std::vector<std::size_t>> rows;
    for (std::size_t idx : by_label[label]) {
      const std::string& u = eval.slice(idx).utterance_id;
      if (!rows.contains(u)) utts.push_back(u);
      rows[u].push_back(idx);
    }
    if (static_cast<int>(utts.size()) < options.enroll + 1) {
      spdlog::warn("speaker {} has {} utterance(s); skipped in the protocol",
                   speaker, utts.size());
      continue;
    }
    std::seed_seq seq{options.seed, static_cast<std::uint64_t>(label),
                      std::uint64_t{0xE7}};
    std::mt19937_64 rng(seq);
    std::shuffle(utts.begin(), utts.end(), rng);
    auto utterance_embedding = [&](const std::string& u) {
      const auto& r = rows[u];
      Tensor<float> e({static_cast<int>(r.size()), all.shape().c});
      for (std::size_t i = 0; i < r.size(); ++i) {
        const auto src = all.sample(static_cast<int>(r[i]));
        std::copy(src.begin(), src.end(),
                  e.sample(static_cast<int>(i)).begin());
      }
      return Normalized(MeanRow(e));
    };
    const std::size_t dim = all.shape().per_sample();
    Tensor<float> enroll({options.enroll, static_cast<int>(dim)});
    for (int i = 0; i < options.enroll; ++i) {
      const auto e = utterance_embedding(utts[i]);
      std::copy(e.begin(), e.end(), enroll.sample(i).begin());
    }
    out.models.push_back(Enroll(speaker, enroll));
    const int last = std::min<int>(static_cast<int>(utts.size()),
                                   options.enroll + options.test);
    for (int i = options.enroll; i < last; ++i) {
      out.tests.push_back({utts[i], speaker, utterance_embedding(utts[i])});
    }
  }
  out.trials = BuildTrials(out.models, out.tests);
  out.eer = ComputeEer(out.trials);
  out.accuracy = ComputeAccuracy(out.trials);
  return out;
}

ExperimentResult RunExperiment(const FeatureSet& corpus,
                               const TrainConfig& config, int holdout,
                               const ProtocolOptions& protocol,
                               const std::filesystem::path& out_dir,
                               const std::string& label) {
  const auto start = std::chrono::steady_clock::now();
  auto [train, eval] = corpus.SplitHoldout(holdout);
  Trainer trainer(config, train.num_classes());
  trainer.Train(train, out_dir);
  const ProtocolResult pr =
      RunProtocol(trainer.nets().encoder, eval, protocol);
  ExperimentResult r;
  r.label = label;
  r.eer = pr.eer.eer;
  r.accuracy = pr.accuracy.accuracy;
  r.trials = pr.trials.trials.size();
  r.seconds = std::chrono::duration<double>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  spdlog::info("{}: EER {:.2f}%, ACC {:.2f}% ({} trials, {:.1f}s)", label,
               100.0 * r.eer, 100.0 * r.accuracy, r.trials, r.seconds);
  return r;
}

std::vector<SweepRow> EmbeddingDimSweep(const FeatureSet& corpus,
                                        std::span<const int> dims,
                                        const TrainConfig& config, int holdout,
                                        const ProtocolOptions& protocol) {
  std::vector<SweepRow> rows;
  for (int dim : dims) {
    TrainConfig c = config;
    c.net.embed_dim = dim;
    const ExperimentResult r = RunExperiment(
        corpus, c, holdout, protocol, {}, "dim " + std::to_string(dim));
    rows.push_back({dim, r.eer, r.accuracy});
  }
  return rows;
}

std::vector<ExperimentResult> Ablate(const FeatureSet& corpus,
                                     const TrainConfig& config,
                                     std::span<const std::string> drops,
                                     bool with_full, int holdout,
                                     const ProtocolOptions& protocol) {
  std::vector<ExperimentResult> rows;
  for (const std::string& drop : drops) {
    TrainConfig c = config;
    std::string label;
    if (drop == "gan") {
      c.use_gan = false;
      label = "w/o GAN";
    } else if (drop == "softmax") {
      c.use_softmax = false;
      label = "w/o softmax loss";
    } else if (drop == "triplet") {
      c.use_triplet = false;
      label = "w/o triplet loss";
    } else {
      throw ConfigError("unknown ablation '" + drop +
                        "' (expected gan, softmax or triplet)");
    }
    rows.push_back(RunExperiment(corpus, c, holdout, protocol, {}, label));
  }
  if (with_full) {
    rows.push_back(RunExperiment(corpus, config, holdout, protocol, {}, "MTGAN"));
  }
  return rows;
}

std::string PrintReport(std::span<const ExperimentResult> rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.label.size());
  std::string out = fmt::format("{:<{}}  {:>8}  {:>8}\n", "System", width,
                                "EER (%)", "ACC (%)");
  for (const auto& r : rows) {
    out += fmt::format("{:<{}}  {:>8.2f}  {:>8.2f}\n", r.label, width,
                       100.0 * r.eer, 100.0 * r.accuracy);
  }
  return out;
}

std::string PrintSweep(std::span<const SweepRow> rows) {
  std::string out = fmt::format("{:>5}  {:>8}  {:>8}\n", "dim", "EER (%)",
                                "ACC (%)");
  for (const auto& r : rows) {
    out += fmt::format("{:>5}  {:>8.2f}  {:>8.2f}\n", r.dim, 100.0 * r.eer,
                       100.0 * r.accuracy);
  }
  return out;
}

}  // namespace mtgan
