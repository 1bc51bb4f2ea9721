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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gen.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "mtgan/config.hpp"
#include "mtgan/evalkit.hpp"
#include "mtgan/features.hpp"
#include "mtgan/inference.hpp"
#include "mtgan/losses.hpp"
#include "mtgan/sampler.hpp"
#include "mtgan/trainer.hpp"

namespace {

using namespace mtgan;
using testing::Gen;
namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kGradTol = 1e-4;
constexpr int kGradProbes = 24;
constexpr double kGradBudgetS = 120.0;
constexpr int kMetricSets = 200;
constexpr int kMetricMaxTrials = 1000;
constexpr double kMetricTol = 1e-9;
constexpr double kMetricBudgetS = 60.0;
constexpr int kMiningBatches = 100;
constexpr int kMiningMaxSlices = 64;
constexpr double kMiningBudgetS = 120.0;
constexpr int kSamplingPlans = 50;
constexpr double kLossTol = 1e-9;
constexpr double kPenaltyTol = 1e-8;
constexpr int kAblationSteps = 10;
constexpr int kToySeeds = 5;
constexpr double kToyEerLimit = 0.20;
constexpr double kToyRunBudgetS = 15 * 60.0;
constexpr int kToyMinWorse = 4;
constexpr int kToyHoldout = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;  // printed indented under the verdict
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

TrainConfig ToyConfig(std::uint64_t seed) {
  TrainConfig c = LoadConfig(MTGAN_TOY_CONFIG);
  c.seed = seed;
  return c;
}

FeatureSet ToyCorpus(std::uint64_t seed, const TrainConfig& c) {
  SynthOptions so;
  so.n_speakers = 20;
  so.utts_per_speaker = 10;
  so.frames = c.net.frames;
  so.mels = c.net.mels;
  so.seed = 1000 + seed;
  return MakeSyntheticCorpus(so);
}

// --- 1 ----------------------------------------------------------------------

Outcome GradientCorrectness() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<testing::GradReport> reports = {
      testing::CheckTripletGradients(11, kGradProbes),
      testing::CheckSoftmaxGradients(12, kGradProbes),
      testing::CheckGeneratorGradients(13, kGradProbes),
      testing::CheckCriticGradients(14, kGradProbes)};
  const double t = Seconds(start);
  Outcome o;
  o.pass = t < kGradBudgetS;
  std::string parts;
  for (const auto& r : reports) {
    o.pass = o.pass && r.probes.size() >= 20 && r.max_rel_error() < kGradTol;
    parts += fmt::format("{} {:.1e}/{}, ", r.loss, r.max_rel_error(),
                         r.probes.size());
  }
  o.detail = fmt::format("max rel err/probes: {}tol {:.0e}, {:.1f} s", parts,
                         kGradTol, t);
  return o;
}

// --- 2 ----------------------------------------------------------------------

Outcome MetricOracles() {
  const auto start = std::chrono::steady_clock::now();
  Gen gen(2);
  double worst = 0.0;
  bool thresholds_agree = true;
  for (int i = 0; i < kMetricSets; ++i) {
    const TrialScoreSet set = testing::RandomTrialSet(gen, kMetricMaxTrials);
    worst = std::max(worst, std::abs(ComputeEer(set).eer - testing::OracleEer(set)));
    const auto [acc, thr] = testing::OracleAccuracy(set);
    const auto got = ComputeAccuracy(set);
    worst = std::max(worst, std::abs(got.accuracy - acc));
    thresholds_agree = thresholds_agree && got.threshold == thr;
  }
  const double t = Seconds(start);
  Outcome o;
  o.pass = worst <= kMetricTol && thresholds_agree && t < kMetricBudgetS;
  o.detail = fmt::format("{} sets, max |diff| {:.1e} (tol {:.0e}), {:.1f} s",
                         kMetricSets, worst, kMetricTol, t);
  return o;
}

// --- 3 ----------------------------------------------------------------------

Outcome MiningOracle() {
  const auto start = std::chrono::steady_clock::now();
  Gen gen(3);
  int mismatched = 0;
  std::size_t triples = 0;
  std::size_t fallbacks = 0;
  for (int i = 0; i < kMiningBatches; ++i) {
    const auto b = testing::MakeRandomMiningBatch(gen, kMiningMaxSlices);
    const MinedBatch got = MineBatch(b.emb, b.labels, b.margin);
    const MinedBatch want = testing::OracleMineBatch(b.emb, b.labels, b.margin);
    if (got.triples != want.triples || got.fallback != want.fallback) {
      ++mismatched;
    }
    triples += got.triples.size();
    fallbacks += std::count(got.fallback.begin(), got.fallback.end(), true);
  }
  const double t = Seconds(start);
  Outcome o;
  o.pass = mismatched == 0 && t < kMiningBudgetS;
  o.detail = fmt::format("{} batches, {} triples ({} fallback), {} mismatched, {:.1f} s",
                         kMiningBatches, triples, fallbacks, mismatched, t);
  return o;
}

// --- 4 ----------------------------------------------------------------------

Outcome SamplingCount() {
  Gen gen(4);
  int wrong = 0;
  std::uint64_t total = 0;
  for (int i = 0; i < kSamplingPlans; ++i) {
    FeatureSet fs;
    const int speakers = gen.Int(2, 12);
    for (int s = 0; s < speakers; ++s) {
      const int slices = gen.Int(2, 7);
      for (int u = 0; u < slices; ++u) {
        FbankSlice slice;
        slice.frames = 1;
        slice.mels = 2;
        slice.data = {static_cast<float>(s), static_cast<float>(u)};
        slice.speaker_id = fmt::format("s{}", s);
        slice.utterance_id = fmt::format("s{}_{}", s, u);
        fs.Add(std::move(slice));
      }
    }
    SamplingPlan p;
    p.speakers = gen.Int(2, speakers);
    p.anchors = gen.Int(1, 5);
    p.positives = gen.Int(1, 4);
    p.other_classes = gen.Int(1, 6);
    p.negatives = gen.Int(1, 4);
    p.mode = gen.Bool() ? SamplingMode::kSemiHard : SamplingMode::kRandom;
    p.mining_batch = gen.Int(2, 64);
    const auto table = std::make_shared<Tensor<float>>(
        gen.UnitRows<float>(static_cast<int>(fs.size()), 4));
    const EmbedFn embed = [table](std::span<const std::size_t> idx) {
      Tensor<float> out({static_cast<int>(idx.size()), 4});
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto row = table->sample(static_cast<int>(idx[k]));
        std::copy(row.begin(), row.end(), out.sample(static_cast<int>(k)).begin());
      }
      return out;
    };
    const TripletSampler sampler(p, fs, gen.Int(0, 1 << 20));
    const std::uint64_t expect = static_cast<std::uint64_t>(p.speakers) *
                                 p.anchors * p.positives * p.other_classes *
                                 p.negatives;
    const std::uint64_t got = sampler.SampleEpoch(i, embed).triples.size();
    if (got != expect) ++wrong;
    total += got;
  }
  Outcome o;
  o.pass = wrong == 0;
  o.detail = fmt::format("{} plans, {} triples drawn, {} counts wrong",
                         kSamplingPlans, total, wrong);
  return o;
}

// --- 5 ----------------------------------------------------------------------

Outcome LossAnalytics() {
  Gen gen(5);
  double softmax_err = 0.0;
  for (int c : {2, 10, 20, 1252}) {
    Tensor<double> logits({7, c}, gen.Normal());
    std::vector<int> labels(7);
    for (int& l : labels) l = gen.Int(0, c - 1);
    softmax_err = std::max(
        softmax_err, std::abs(SoftmaxLoss<double>(logits, labels) - std::log(c)));
  }
  double triplet_err = 0.0;
  for (int n : {1, 8, 64}) {
    const auto a = gen.UnitRows<double>(n, 16);
    const double alpha = gen.Real(0.0, 1.0);
    triplet_err = std::max(
        triplet_err, std::abs(TripletLoss<double>(a, a, a, Margin(alpha)) - n * alpha));
  }
  NetConfig cfg = testing::TinyNetConfig();
  cfg.critic_channels.clear();
  CriticNet<double> critic(cfg);
  critic.Init(5);
  auto params = critic.Params();
  const auto w = gen.UnitVector(static_cast<int>(params[0].value->size()));
  std::copy(w.begin(), w.end(), params[0].value->data());
  double gp_max = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto real = gen.NormalTensor<double>({6, 1, 8, 8});
    const auto fake = gen.NormalTensor<double>({6, 1, 8, 8}, 2.0);
    std::vector<double> eps(6);
    for (double& e : eps) e = gen.Real();
    gp_max = std::max(gp_max, std::abs(GradientPenalty<double>(critic, real, fake, eps)));
  }
  int lg_mismatch = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> real(gen.Int(1, 50));
    std::vector<double> fake(gen.Int(1, 50));
    for (double& s : real) s = gen.Normal(5.0);
    for (double& s : fake) s = gen.Normal(5.0);
    double mean = 0.0;
    for (double s : fake) mean += s;
    mean /= static_cast<double>(fake.size());
    const auto l = WassersteinLosses<double>(real, fake, 0.0, 10.0);
    if (l.generator != -mean) ++lg_mismatch;
  }
  Outcome o;
  o.pass = softmax_err <= kLossTol && triplet_err <= kLossTol &&
           gp_max <= kPenaltyTol && lg_mismatch == 0;
  o.detail = fmt::format(
      "|L_S - ln C| {:.1e}, |L_T - N*alpha| {:.1e}, linear-critic GP {:.1e}, "
      "L_G != -mean(fake) in {}/100",
      softmax_err, triplet_err, gp_max, lg_mismatch);
  return o;
}

// --- 6 ----------------------------------------------------------------------

std::vector<Tensor<float>> Snapshot(Network<float>& net) {
  std::vector<Tensor<float>> out;
  for (auto& p : net.Params()) out.push_back(*p.value);
  for (auto& b : net.Buffers()) out.push_back(*b.value);
  return out;
}

bool Same(const std::vector<Tensor<float>>& a, const std::vector<Tensor<float>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size() ||
        std::memcmp(a[k].data(), b[k].data(), a[k].size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

std::vector<TrainBatch> FirstBatches(const FeatureSet& fs, const TrainConfig& c,
                                     std::size_t count) {
  const TripletSampler sampler(c.plan, fs, c.seed);
  std::vector<TrainBatch> out;
  for (int epoch = 0; out.size() < count; ++epoch) {
    for (const auto& b : SplitBatches(sampler.SampleEpoch(epoch).triples, c.batch_triplets)) {
      if (out.size() == count) break;
      out.push_back(MakeBatch(fs, b));
    }
  }
  return out;
}

Outcome AblationContract() {
  TrainConfig base;
  base.net = testing::TinyNetConfig();
  base.plan.anchors = 2;
  base.plan.other_classes = 2;
  base.batch_triplets = 8;
  base.seed = 6;
  SynthOptions so;
  so.n_speakers = 5;
  so.utts_per_speaker = 5;
  so.frames = 8;
  so.mels = 8;
  so.seed = 6;
  const FeatureSet fs = MakeSyntheticCorpus(so);
  const auto batches = FirstBatches(fs, base, kAblationSteps);

  TrainConfig no_gan = base;
  no_gan.use_gan = false;
  Trainer g(no_gan, fs.num_classes());
  const auto critic0 = Snapshot(g.nets().critic);
  const auto gen0 = Snapshot(g.nets().generator);
  for (const auto& b : batches) g.TrainStep(b);
  const bool gan_ok = Same(Snapshot(g.nets().critic), critic0) &&
                      Same(Snapshot(g.nets().generator), gen0);

  TrainConfig no_softmax = base;
  no_softmax.use_softmax = false;
  Trainer s(no_softmax, fs.num_classes());
  const auto cls0 = Snapshot(s.nets().classifier);
  for (const auto& b : batches) s.TrainStep(b);
  const bool softmax_ok = Same(Snapshot(s.nets().classifier), cls0);

  // The triplet loss has no parameters of its own; switching it off must be
  // bitwise the same as a zero triplet weight across all four networks.
  TrainConfig no_triplet = base;
  no_triplet.use_triplet = false;
  TrainConfig zero_weight = base;
  zero_weight.weights.triplet = 0.0;
  Trainer a(no_triplet, fs.num_classes());
  Trainer z(zero_weight, fs.num_classes());
  for (const auto& b : batches) {
    a.TrainStep(b);
    z.TrainStep(b);
  }
  const bool triplet_ok =
      Same(Snapshot(a.nets().encoder), Snapshot(z.nets().encoder)) &&
      Same(Snapshot(a.nets().generator), Snapshot(z.nets().generator)) &&
      Same(Snapshot(a.nets().critic), Snapshot(z.nets().critic)) &&
      Same(Snapshot(a.nets().classifier), Snapshot(z.nets().classifier));

  Outcome o;
  o.pass = gan_ok && softmax_ok && triplet_ok;
  o.detail = fmt::format(
      "{} steps: w/o GAN critic+generator {}, w/o softmax classifier {}, "
      "w/o triplet == zero weight {}",
      kAblationSteps, gan_ok ? "unchanged" : "CHANGED",
      softmax_ok ? "unchanged" : "CHANGED", triplet_ok ? "yes" : "NO");
  return o;
}

// --- 7 ----------------------------------------------------------------------

Outcome ToyEndToEnd() {
  Outcome o;
  int worse = 0;
  bool all_below = true;
  bool within_budget = true;
  double max_eer = 0.0;
  o.notes.push_back("seed   full EER  w/o softmax EER   full s");
  for (int seed = 0; seed < kToySeeds; ++seed) {
    const TrainConfig full = ToyConfig(seed);
    const FeatureSet corpus = ToyCorpus(seed, full);
    ProtocolOptions po;
    po.seed = seed;
    const ExperimentResult r_full = RunExperiment(corpus, full, kToyHoldout, po);
    TrainConfig ablated = full;
    ablated.use_softmax = false;
    const ExperimentResult r_abl =
        RunExperiment(corpus, ablated, kToyHoldout, po, {}, "w/o softmax loss");
    if (r_abl.eer > r_full.eer) ++worse;
    all_below = all_below && r_full.eer < kToyEerLimit;
    within_budget = within_budget && r_full.seconds <= kToyRunBudgetS &&
                    r_abl.seconds <= kToyRunBudgetS;
    max_eer = std::max(max_eer, r_full.eer);
    o.notes.push_back(fmt::format("{:>4} {:>9.2f}% {:>15.2f}% {:>8.1f}", seed,
                                  100.0 * r_full.eer, 100.0 * r_abl.eer,
                                  r_full.seconds));
  }
  o.pass = all_below && within_budget && worse >= kToyMinWorse;
  o.detail = fmt::format(
      "full EER max {:.2f}% (limit {:.0f}%), w/o softmax worse in {}/{} seeds "
      "(need {}), runs {} 15 min",
      100.0 * max_eer, 100.0 * kToyEerLimit, worse, kToySeeds, kToyMinWorse,
      within_budget ? "within" : "OVER");
  return o;
}

// --- 8 ----------------------------------------------------------------------

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inference-mode outputs of all four networks on fixed inputs.
std::vector<Tensor<float>> ForwardOutputs(Trainer& t, const FeatureSet& fs) {
  std::vector<std::size_t> idx(std::min<std::size_t>(fs.size(), 32));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const Tensor<float> x = SlicesToTensor(fs, idx);
  Gen gen(8);
  const auto z = gen.NormalTensor<float>(
      {static_cast<int>(idx.size()), t.config().net.noise_dim});
  auto& n = t.nets();
  const Tensor<float> e = n.encoder.Forward(x, Mode::kInfer);
  return {e, n.generator.Forward(e, z, Mode::kInfer),
          n.critic.Forward(x, Mode::kInfer), n.classifier.Forward(x, Mode::kInfer)};
}

Outcome Determinism() {
  const fs::path dir = fs::path(MTGAN_TEST_TMPDIR) / "determinism";
  fs::remove_all(dir);
  TrainConfig c = ToyConfig(8);
  c.epochs = 3;
  const FeatureSet corpus = ToyCorpus(8, c);
  const FeatureSet train = corpus.SplitHoldout(kToyHoldout).first;

  for (const char* run : {"a", "b"}) {
    Trainer t(c, train.num_classes());
    t.Train(train, dir / run);
  }
  const std::string csv_a = Slurp(dir / "a" / "losses.csv");
  const bool csv_same = !csv_a.empty() && csv_a == Slurp(dir / "b" / "losses.csv");

  TrainConfig first = c;
  first.epochs = 1;
  {
    Trainer t(first, train.num_classes());
    t.Train(train, dir / "split");
  }
  Trainer resumed = Trainer::Resume(dir / "split" / "checkpoint.mtgc", c);
  resumed.Train(train, dir / "split");
  Trainer straight = Trainer::LoadCheckpoint(dir / "a" / "checkpoint.mtgc");
  const bool forward_same =
      Same(ForwardOutputs(resumed, train), ForwardOutputs(straight, train));
  const bool resumed_csv_same = Slurp(dir / "split" / "losses.csv") == csv_a;

  Outcome o;
  o.pass = csv_same && forward_same && resumed_csv_same;
  o.detail = fmt::format(
      "repeat run loss CSV {}, resumed run forward outputs {}, resumed CSV {}",
      csv_same ? "identical" : "DIFFERS", forward_same ? "bit-identical" : "DIFFER",
      resumed_csv_same ? "identical" : "DIFFERS");
  return o;
}

// --- 9 ----------------------------------------------------------------------

Outcome DimSweep() {
  const std::vector<int> dims = {64, 128, 256, 512};
  const TrainConfig c = ToyConfig(9);
  ProtocolOptions po;
  po.seed = 9;
  const auto rows = EmbeddingDimSweep(ToyCorpus(9, c), dims, c, kToyHoldout, po);
  bool well_formed = rows.size() == dims.size();
  for (std::size_t i = 0; well_formed && i < rows.size(); ++i) {
    well_formed = rows[i].dim == dims[i] && std::isfinite(rows[i].eer) &&
                  rows[i].eer >= 0.0 && rows[i].eer <= 1.0 &&
                  rows[i].accuracy >= 0.0 && rows[i].accuracy <= 1.0;
  }
  const std::string table = PrintSweep(rows);
  well_formed = well_formed &&
                std::count(table.begin(), table.end(), '\n') ==
                    static_cast<long>(dims.size()) + 1;
  Outcome o;
  o.pass = well_formed;
  std::string summary;
  for (const auto& r : rows) summary += fmt::format("{}:{:.2f}% ", r.dim, 100.0 * r.eer);
  o.detail = fmt::format("(dim, EER) table {}: {}", well_formed ? "well-formed" : "MALFORMED",
                         summary);
  std::istringstream lines(table);
  for (std::string line; std::getline(lines, line);) o.notes.push_back(line);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", GradientCorrectness},
      {2, "EER/accuracy oracle equivalence", MetricOracles},
      {3, "semi-hard mining oracle", MiningOracle},
      {4, "sampling count", SamplingCount},
      {5, "loss analytics", LossAnalytics},
      {6, "ablation contract", AblationContract},
      {7, "toy-scale end-to-end", ToyEndToEnd},
      {8, "determinism", Determinism},
      {9, "embedding-dim sweep", DimSweep},
  };
  // Usage: mtgan_acceptance [--known-failure N]... [criterion]...
  // A known failure still prints FAIL but does not change the exit code.
  std::set<int> only, known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failure" && i + 1 < argc)
      known.insert(std::atoi(argv[++i]));
    else
      only.insert(std::atoi(arg.c_str()));
  }
  fs::create_directories(MTGAN_TEST_TMPDIR);

  int failed = 0, known_failed = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("threw: {}", e.what());
    }
    if (!o.pass) ++(known.count(c.id) ? known_failed : failed);
    std::cout << fmt::format("{} {} {}: {}\n", o.pass ? "PASS" : "FAIL", c.id,
                             c.name, o.detail);
    for (const auto& note : o.notes) std::cout << "    " << note << '\n';
    std::cout.flush();
  }
  if (failed == 0 && known_failed == 0)
    std::cout << "all criteria passed\n";
  else
    std::cout << fmt::format("{} criteria failed, {} known failures\n",
                             failed, known_failed);
  return failed == 0 ? 0 : 1;
}
