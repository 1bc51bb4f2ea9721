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

// mtgan: batch command-line front end for the training and evaluation
// pipeline. Exit codes: 0 success, 1 usage or config error, 2 runtime error.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mtgan/config.hpp"
#include "mtgan/error.hpp"
#include "mtgan/evalkit.hpp"
#include "mtgan/features.hpp"
#include "mtgan/inference.hpp"
#include "mtgan/trainer.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string log_level = "info";
};

std::uint64_t ResolveSeed(const Common& c, std::uint64_t fallback) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("MTGAN_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw mtgan::ConfigError(fmt::format("MTGAN_SEED='{}' is not an unsigned integer", env));
  }
  return fallback;
}

mtgan::FeatureSet LoadCorpus(const fs::path& path) {
  return mtgan::LoadFeatures(path).features;
}

// Evaluation speakers: the last `holdout` speakers, or all of them.
mtgan::FeatureSet EvalSpeakers(const mtgan::FeatureSet& fs, int holdout) {
  if (holdout <= 0) return fs;
  return fs.SplitHoldout(holdout).second;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (ch != ' ') {
      item += ch;
    }
  }
  return out;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
  mtgan::SynthOptions opts;
  std::string out;
};

void RunSynth(SynthArgs a, const Common& common) {
  a.opts.seed = ResolveSeed(common, 0);
  const mtgan::FeatureSet fs = mtgan::MakeSyntheticCorpus(a.opts);
  mtgan::SaveFeatures(a.out, fs);
  std::cout << fmt::format("wrote {} slices from {} speakers to {}\n",
                           fs.size(), fs.num_classes(), a.out);
}

// --- extract ----------------------------------------------------------------

struct ExtractArgs {
  std::string in;
  std::string out;
  mtgan::FbankOptions opts;
};

// Layout: <in>/<speaker>/<utterance>.wav, visited in sorted order.
void RunExtract(const ExtractArgs& a) {
  std::vector<fs::path> speakers;
  for (const auto& e : fs::directory_iterator(a.in)) {
    if (e.is_directory()) speakers.push_back(e.path());
  }
  std::sort(speakers.begin(), speakers.end());
  std::vector<mtgan::Utterance> utts;
  for (const fs::path& dir : speakers) {
    std::vector<fs::path> wavs;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") {
        wavs.push_back(e.path());
      }
    }
    std::sort(wavs.begin(), wavs.end());
    for (const fs::path& wav : wavs) {
      mtgan::Utterance u = mtgan::ReadWav(wav);
      u.speaker_id = dir.filename().string();
      u.utterance_id = u.speaker_id + "/" + wav.stem().string();
      utts.push_back(std::move(u));
    }
  }
  if (utts.empty()) {
    throw mtgan::ConfigError("no <speaker>/<utterance>.wav files under " + a.in);
  }
  const mtgan::FeatureSet fs = mtgan::ExtractFeatures(utts, a.opts);
  mtgan::SaveFeatures(a.out, fs);
  std::cout << fmt::format("wrote {} slices from {} utterances ({} speakers) to {}\n",
                           fs.size(), utts.size(), fs.num_classes(), a.out);
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string in;
  std::string out;
  int holdout = 0;
  bool resume = false;
  std::string triples_log;
};

mtgan::TrainConfig ConfigWithSeed(const std::string& path, const Common& c) {
  mtgan::TrainConfig cfg = path.empty() ? mtgan::TrainConfig{} : mtgan::LoadConfig(path);
  cfg.seed = ResolveSeed(c, cfg.seed);
  cfg.Validate();
  return cfg;
}

void RunTrain(const TrainArgs& a, const Common& common) {
  const mtgan::TrainConfig cfg = ConfigWithSeed(a.config, common);
  mtgan::FeatureSet train = LoadCorpus(a.in);
  if (a.holdout > 0) train = train.SplitHoldout(a.holdout).first;
  fs::create_directories(a.out);
  const fs::path ckpt = fs::path(a.out) / "checkpoint.mtgc";
  if (a.resume) {
    mtgan::Trainer t = mtgan::Trainer::Resume(ckpt, cfg);
    t.set_triple_log(a.triples_log);
    t.Train(train, a.out);
    std::cout << fmt::format("resumed at epoch {}; trained to epoch {} ({} steps)\n",
                             cfg.epochs, t.state().epoch, t.state().step);
    return;
  }
  mtgan::Trainer t(cfg, train.num_classes());
  t.set_triple_log(a.triples_log);
  t.Train(train, a.out);
  std::cout << fmt::format("trained {} epochs ({} steps); checkpoint {}\n",
                           t.state().epoch, t.state().step, ckpt.string());
}

// --- enroll -----------------------------------------------------------------

struct EnrollArgs {
  std::string checkpoint;
  std::string in;
  std::string out;
  int holdout = 0;
};

void RunEnroll(const EnrollArgs& a) {
  mtgan::Trainer t = mtgan::Trainer::LoadCheckpoint(a.checkpoint);
  const mtgan::FeatureSet eval = EvalSpeakers(LoadCorpus(a.in), a.holdout);
  nlohmann::json models = nlohmann::json::array();
  const auto by_label = eval.IndicesByLabel();
  for (std::size_t label = 0; label < by_label.size(); ++label) {
    const auto emb = mtgan::EncodeSlices(t.nets().encoder, eval, by_label[label]);
    const mtgan::SpeakerModel m = mtgan::Enroll(eval.speakers()[label], emb);
    models.push_back({{"speaker_id", m.speaker_id},
                      {"n_enroll", m.n_enroll},
                      {"centroid", m.centroid}});
  }
  std::ofstream(a.out) << nlohmann::json{{"models", models}}.dump(1) << '\n';
  std::cout << fmt::format("enrolled {} speakers to {}\n", models.size(), a.out);
}

// --- score ------------------------------------------------------------------

struct ScoreArgs {
  std::string checkpoint;
  std::string in;
  std::string trials_in;
  std::string trials_out;
  int holdout = 0;
  mtgan::ProtocolOptions protocol;
};

void PrintMetrics(const mtgan::TrialScoreSet& trials) {
  const auto eer = mtgan::ComputeEer(trials);
  const auto acc = mtgan::ComputeAccuracy(trials);
  std::cout << fmt::format("EER={:.2f}%, ACC={:.2f}%\n", 100.0 * eer.eer,
                           100.0 * acc.accuracy);
}

void RunScore(ScoreArgs a, const Common& common) {
  if (!a.trials_in.empty()) {
    PrintMetrics(mtgan::ReadTrialsCsv(a.trials_in));
    return;
  }
  if (a.checkpoint.empty() || a.in.empty()) {
    throw mtgan::ConfigError("score needs --checkpoint and --input, or --trials-in");
  }
  mtgan::Trainer t = mtgan::Trainer::LoadCheckpoint(a.checkpoint);
  a.protocol.seed = ResolveSeed(common, t.config().seed);
  const mtgan::FeatureSet eval = EvalSpeakers(LoadCorpus(a.in), a.holdout);
  const mtgan::ProtocolResult r = mtgan::RunProtocol(t.nets().encoder, eval, a.protocol);
  if (!a.trials_out.empty()) mtgan::WriteTrialsCsv(a.trials_out, r.trials);
  PrintMetrics(r.trials);
}

// --- det --------------------------------------------------------------------

struct DetArgs {
  std::string trials;
  std::string out;
  std::size_t points = 0;
};

void RunDet(const DetArgs& a) {
  const auto curve = mtgan::DetCurve(mtgan::ReadTrialsCsv(a.trials), a.points);
  mtgan::WriteDetCsv(a.out, curve);
  std::cout << fmt::format("wrote {} operating points to {}\n", curve.size(), a.out);
}

// --- sweep / ablate ---------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  std::string in;
  int holdout = 5;
  std::vector<int> dims = {64, 128, 256, 512};
  std::string drop = "gan,softmax,triplet";
  bool with_full = false;
  mtgan::ProtocolOptions protocol;
};

void RunSweep(ExperimentArgs a, const Common& common) {
  const mtgan::TrainConfig cfg = ConfigWithSeed(a.config, common);
  a.protocol.seed = cfg.seed;
  const auto rows = mtgan::EmbeddingDimSweep(LoadCorpus(a.in), a.dims, cfg,
                                             a.holdout, a.protocol);
  std::cout << mtgan::PrintSweep(rows);
}

void RunAblate(ExperimentArgs a, const Common& common) {
  const mtgan::TrainConfig cfg = ConfigWithSeed(a.config, common);
  a.protocol.seed = cfg.seed;
  const auto drops = SplitList(a.drop);
  const auto rows = mtgan::Ablate(LoadCorpus(a.in), cfg, drops, a.with_full,
                                  a.holdout, a.protocol);
  std::cout << mtgan::PrintReport(rows);
}

void AddProtocolOptions(CLI::App* cmd, mtgan::ProtocolOptions& p) {
  cmd->add_option("--enroll", p.enroll, "Enrollment utterances per speaker")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--test", p.test, "Test utterances per speaker")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtgan: multitask speaker-embedding training and verification"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--seed", common.seed, "Seed override (else MTGAN_SEED, else config)");
  app.add_option("--log-level", common.log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic feature corpus");
  c_synth->add_option("--speakers", synth.opts.n_speakers)->check(CLI::PositiveNumber);
  c_synth->add_option("--utts", synth.opts.utts_per_speaker)->check(CLI::PositiveNumber);
  c_synth->add_option("--frames", synth.opts.frames)->check(CLI::PositiveNumber);
  c_synth->add_option("--mels", synth.opts.mels)->check(CLI::PositiveNumber);
  c_synth->add_option("--noise", synth.opts.noise_sd)->check(CLI::NonNegativeNumber);
  c_synth->add_option("-o,--output", synth.out, "Feature file")->required();

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "WAV directory to feature file");
  c_extract->add_option("-i,--input", extract.in, "Directory of <speaker>/<utt>.wav")
      ->required()->check(CLI::ExistingDirectory);
  c_extract->add_option("-o,--output", extract.out, "Feature file")->required();
  c_extract->add_option("--frames", extract.opts.n_frames)->check(CLI::PositiveNumber);
  c_extract->add_option("--mels", extract.opts.n_mels)->check(CLI::PositiveNumber);
  c_extract->add_option("--slice-seconds", extract.opts.slice_seconds)
      ->check(CLI::PositiveNumber);
  c_extract->add_option("--hop-seconds", extract.opts.hop_seconds)
      ->check(CLI::PositiveNumber);

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train all networks");
  c_train->add_option("-c,--config", train.config, "Config file")->check(CLI::ExistingFile);
  c_train->add_option("-i,--input", train.in, "Feature file")->required()->check(CLI::ExistingFile);
  c_train->add_option("-o,--output", train.out, "Output directory")->required();
  c_train->add_option("--holdout", train.holdout, "Exclude the last N speakers")
      ->check(CLI::NonNegativeNumber);
  c_train->add_flag("--resume", train.resume, "Continue from <output>/checkpoint.mtgc");
  c_train->add_option("--triples-log", train.triples_log, "Audit CSV of sampled triples");

  EnrollArgs enroll;
  auto* c_enroll = app.add_subcommand("enroll", "Write speaker models as JSON");
  c_enroll->add_option("-k,--checkpoint", enroll.checkpoint)->required()->check(CLI::ExistingFile);
  c_enroll->add_option("-i,--input", enroll.in, "Feature file")->required()->check(CLI::ExistingFile);
  c_enroll->add_option("-o,--output", enroll.out, "Models JSON")->required();
  c_enroll->add_option("--holdout", enroll.holdout, "Use only the last N speakers")
      ->check(CLI::NonNegativeNumber);

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Run the enroll/test protocol and print EER and ACC");
  c_score->add_option("-k,--checkpoint", score.checkpoint)->check(CLI::ExistingFile);
  c_score->add_option("-i,--input", score.in, "Feature file")->check(CLI::ExistingFile);
  c_score->add_option("--holdout", score.holdout, "Evaluate only the last N speakers")
      ->check(CLI::NonNegativeNumber);
  c_score->add_option("--trials", score.trials_out, "Write trial scores to CSV");
  c_score->add_option("--trials-in", score.trials_in, "Score an existing trial CSV")
      ->check(CLI::ExistingFile);
  AddProtocolOptions(c_score, score.protocol);

  DetArgs det;
  auto* c_det = app.add_subcommand("det", "DET curve CSV and gnuplot script");
  c_det->add_option("-t,--trials", det.trials)->required()->check(CLI::ExistingFile);
  c_det->add_option("-o,--output", det.out, "CSV path")->required();
  c_det->add_option("--points", det.points, "Downsample to N points (0 keeps all)");

  ExperimentArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Embedding-dimension sweep");
  c_sweep->add_option("-c,--config", sweep.config)->check(CLI::ExistingFile);
  c_sweep->add_option("-i,--input", sweep.in)->required()->check(CLI::ExistingFile);
  c_sweep->add_option("--holdout", sweep.holdout)->check(CLI::PositiveNumber);
  c_sweep->add_option("--dims", sweep.dims)->delimiter(',')->check(CLI::PositiveNumber);
  AddProtocolOptions(c_sweep, sweep.protocol);

  ExperimentArgs ablate;
  auto* c_ablate = app.add_subcommand("ablate", "Train with components removed");
  c_ablate->add_option("-c,--config", ablate.config)->check(CLI::ExistingFile);
  c_ablate->add_option("-i,--input", ablate.in)->required()->check(CLI::ExistingFile);
  c_ablate->add_option("--holdout", ablate.holdout)->check(CLI::PositiveNumber);
  c_ablate->add_option("--drop", ablate.drop, "Comma list of gan, softmax, triplet");
  c_ablate->add_flag("--with-full", ablate.with_full, "Also train the full model");
  AddProtocolOptions(c_ablate, ablate.protocol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  auto logger = spdlog::stderr_color_mt("mtgan");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(common.log_level));

  try {
    if (*c_synth) RunSynth(synth, common);
    if (*c_extract) RunExtract(extract);
    if (*c_train) RunTrain(train, common);
    if (*c_enroll) RunEnroll(enroll);
    if (*c_score) RunScore(score, common);
    if (*c_det) RunDet(det);
    if (*c_sweep) RunSweep(sweep, common);
    if (*c_ablate) RunAblate(ablate, common);
  } catch (const mtgan::ConfigError& e) {
    std::cerr << "mtgan: error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "mtgan: error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
