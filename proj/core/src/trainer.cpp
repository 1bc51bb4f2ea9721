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

#include "mtgan/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "binary_io.hpp"
#include "mtgan/error.hpp"
#include "mtgan/inference.hpp"

namespace mtgan {

namespace {

constexpr char kCheckpointMagic[4] = {'M', 'T', 'G', 'C'};
constexpr std::uint16_t kCheckpointVersion = 1;

void AddScaled(Tensor<float>& dst, const Tensor<float>& src, float scale) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

// Adds rows [offset, offset + dst.n) of src into dst.
void AddRows(Tensor<float>& dst, const Tensor<float>& src, int offset) {
  const std::size_t ps = dst.shape().per_sample();
  const float* s = src.data() + static_cast<std::size_t>(offset) * ps;
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s[i];
}

std::vector<Tensor<float>> SnapshotBuffers(Network<float>& net) {
  std::vector<Tensor<float>> out;
  for (auto& b : net.Buffers()) out.push_back(*b.value);
  return out;
}

void RestoreBuffers(Network<float>& net,
                    const std::vector<Tensor<float>>& saved) {
  auto buffers = net.Buffers();
  for (std::size_t i = 0; i < buffers.size(); ++i) *buffers[i].value = saved[i];
}

void CheckGradients(Network<float>& net) {
  for (auto& p : net.Params()) {
    for (float g : p.grad->span()) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in " + p.name);
      }
    }
  }
}

AdamOptions MainOptions(const TrainConfig& c, double lr) {
  return {lr, c.beta1, c.beta2, c.adam_eps};
}

AdamOptions AdversarialOptions(const TrainConfig& c, double lr) {
  return {lr, c.adv_beta1, c.adv_beta2, c.adam_eps};
}

NetConfig WithClasses(NetConfig net, int num_classes) {
  net.num_classes = num_classes;
  return net;
}

void PutTensors(io::ByteWriter& w, const std::vector<std::string>& names,
                const std::vector<Tensor<float>*>& tensors) {
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(tensors.size()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    w.PutString(names[i]);
    w.Put<std::uint64_t>(tensors[i]->size());
    w.PutFloats(tensors[i]->span());
  }
}

void GetTensors(io::ByteReader& r, const std::vector<std::string>& names,
                const std::vector<Tensor<float>*>& tensors) {
  const std::uint64_t at = r.offset();
  const auto count = r.Get<std::uint32_t>("tensor count");
  if (count != tensors.size()) {
    throw ParseError("checkpoint holds " + std::to_string(count) +
                         " tensors where " + std::to_string(tensors.size()) +
                         " were expected",
                     at);
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const std::uint64_t name_at = r.offset();
    const std::string name = r.GetString("tensor name");
    if (name != names[i]) {
      throw ParseError("checkpoint tensor '" + name + "' where '" + names[i] +
                           "' was expected",
                       name_at);
    }
    const std::uint64_t size_at = r.offset();
    const auto size = r.Get<std::uint64_t>("tensor size");
    if (size != tensors[i]->size()) {
      throw ParseError("checkpoint tensor '" + name + "' has " +
                           std::to_string(size) + " values where " +
                           std::to_string(tensors[i]->size()) +
                           " were expected",
                       size_at);
    }
    r.GetFloats(tensors[i]->span(), "tensor values");
  }
}

struct NetTensors {
  std::vector<std::string> param_names;
  std::vector<Tensor<float>*> params;
  std::vector<std::string> buffer_names;
  std::vector<Tensor<float>*> buffers;
};

NetTensors Collect(Network<float>& net) {
  NetTensors out;
  for (auto& p : net.Params()) {
    out.param_names.push_back(p.name);
    out.params.push_back(p.value);
  }
  for (auto& b : net.Buffers()) {
    out.buffer_names.push_back(b.name);
    out.buffers.push_back(b.value);
  }
  return out;
}

}  // namespace

Adam::Adam(std::vector<ParamRef<float>> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.emplace_back(p.value->shape());
    v_.emplace_back(p.value->shape());
  }
}

void Adam::Step() {
  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const float c1 = static_cast<float>(1.0 - std::pow(b1, t_));
  const float c2 = static_cast<float>(1.0 - std::pow(b2, t_));
  const float lr = static_cast<float>(options_.lr);
  const float eps = static_cast<float>(options_.eps);
  const float fb1 = static_cast<float>(b1);
  const float fb2 = static_cast<float>(b2);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor<float>& p = *params_[k].value;
    const Tensor<float>& g = *params_[k].grad;
    Tensor<float>& m = m_[k];
    Tensor<float>& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = fb1 * m[i] + (1.0f - fb1) * g[i];
      v[i] = fb2 * v[i] + (1.0f - fb2) * g[i] * g[i];
      const float mhat = m[i] / c1;
      const float vhat = v[i] / c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

std::string LossCsvRow(const LossRecord& r) {
  return fmt::format("{},{},{},{},{},{},{}", r.step, r.epoch, r.triplet,
                     r.softmax, r.generator, r.discriminator, r.total);
}

TrainBatch MakeBatch(const FeatureSet& features,
                     std::span<const Triplet> triples) {
  if (triples.empty()) throw ShapeError("empty triplet batch");
  std::map<std::size_t, std::size_t> row_of;
  std::vector<std::size_t> order;
  auto row = [&](std::size_t idx) {
    auto [it, inserted] = row_of.emplace(idx, order.size());
    if (inserted) order.push_back(idx);
    return it->second;
  };
  TrainBatch batch;
  for (const Triplet& t : triples) {
    const std::size_t a = row(t.anchor);
    const std::size_t p = row(t.positive);
    const std::size_t n = row(t.negative);
    batch.triples.push_back({a, p, n});
  }
  batch.slices = SlicesToTensor(features, order);
  for (std::size_t idx : order) batch.labels.push_back(features.label(idx));
  return batch;
}

Trainer::Trainer(TrainConfig config, int num_classes)
    : config_([&] {
        config.net.num_classes = num_classes;
        config.Validate();
        if (num_classes < 2) {
          throw ConfigError("training needs at least 2 speakers, got " +
                            std::to_string(num_classes));
        }
        return config;
      }()),
      nets_(WithClasses(config_.net, num_classes)),
      opt_encoder_(nets_.encoder.Params(),
                   MainOptions(config_, config_.lr_encoder)),
      opt_generator_(nets_.generator.Params(),
                     AdversarialOptions(config_, config_.lr_generator)),
      opt_critic_(nets_.critic.Params(),
                  AdversarialOptions(config_, config_.lr_critic)),
      opt_classifier_(nets_.classifier.Params(),
                      MainOptions(config_, config_.lr_classifier)) {
  nets_.InitParams(config_.seed);
}

Tensor<float> Trainer::Noise(int n, std::mt19937_64& rng) const {
  std::normal_distribution<float> normal(0.0f, 1.0f);
  Tensor<float> z({n, config_.net.noise_dim});
  for (float& v : z.span()) v = normal(rng);
  return z;
}

LossRecord Trainer::TrainStep(const TrainBatch& batch) {
  const TrainConfig& c = config_;
  const LossWeights& w = c.weights;
  const int n = batch.slices.shape().n;
  if (n == 0 || static_cast<int>(batch.labels.size()) != n) {
    throw ShapeError("train batch needs one label per slice");
  }
  auto& enc = nets_.encoder;
  auto& gen = nets_.generator;
  auto& critic = nets_.critic;
  auto& cls = nets_.classifier;
  enc.ZeroGrad();
  gen.ZeroGrad();
  critic.ZeroGrad();
  cls.ZeroGrad();

  const std::int64_t step = state_.step + 1;
  std::seed_seq seq{c.seed, static_cast<std::uint64_t>(step),
                    std::uint64_t{0x7E11}};
  std::mt19937_64 rng(seq);

  LossComponents lc;
  const Tensor<float> emb = enc.Forward(batch.slices, Mode::kTrain);
  Tensor<float> d_emb(emb.shape());
  if (c.use_triplet) {
    Tensor<float> g;
    lc.triplet = TripletLoss(emb, batch.triples, Margin(c.margin),
                             c.triplet_reduction, &g);
    AddScaled(d_emb, g, static_cast<float>(w.triplet));
  }

  if (c.use_gan || c.use_softmax) {
    std::vector<Tensor<float>> frozen;
    if (!c.use_gan) frozen = SnapshotBuffers(gen);
    const Tensor<float> z = Noise(n, rng);
    std::vector<double> eps(n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& e : eps) e = unit(rng);

    const Tensor<float> fake = gen.Forward(emb, z, Mode::kTrain);
    const Tensor<float> both = ConcatBatch(batch.slices, fake);
    Tensor<float> d_fake(fake.shape());

    if (c.use_softmax) {
      std::vector<int> labels = batch.labels;
      labels.insert(labels.end(), batch.labels.begin(), batch.labels.end());
      const Tensor<float> logits = cls.Forward(both, Mode::kTrain);
      Tensor<float> g;
      lc.softmax = SoftmaxLoss<float>(logits, labels, &g);
      for (float& v : g.span()) v *= static_cast<float>(w.softmax);
      AddRows(d_fake, cls.Backward(g), n);
    }

    if (c.use_gan) {
      const Tensor<float> scores = critic.Forward(both, Mode::kTrain);
      const std::span<const float> real_s(scores.data(), n);
      const std::span<const float> fake_s(scores.data() + n, n);
      const bool wgan = c.gan_objective == GanObjective::kWassersteinGp;
      GanLosses<float> gl = wgan
                                ? WassersteinLosses<float>(real_s, fake_s, 0.0f,
                                                           c.gp_lambda)
                                : LogLosses<float>(real_s, fake_s);
      Tensor<float> seed({2 * n, 1});
      for (int i = 0; i < n; ++i) {
        seed[n + i] = static_cast<float>(w.generator) * gl.d_gen_d_fake[i];
      }
      AddRows(d_fake, critic.Backward(seed), n);
      critic.ZeroGrad();
      for (int i = 0; i < n; ++i) {
        seed[i] = static_cast<float>(w.discriminator) * gl.d_disc_d_real[i];
        seed[n + i] =
            static_cast<float>(w.discriminator) * gl.d_disc_d_fake[i];
      }
      critic.Backward(seed);
      double penalty = 0.0;
      if (wgan) {
        penalty = GradientPenalty<float>(critic, batch.slices, fake, eps,
                                         w.discriminator * c.gp_lambda);
      }
      lc.generator = gl.generator;
      lc.discriminator = gl.discriminator + c.gp_lambda * penalty;
    }

    AddScaled(d_emb, gen.Backward(d_fake), 1.0f);
    if (!c.use_gan) RestoreBuffers(gen, frozen);
  }
  enc.Backward(d_emb);

  LossRecord rec;
  rec.step = step;
  rec.epoch = state_.epoch;
  rec.triplet = lc.triplet;
  rec.softmax = lc.softmax;
  rec.generator = lc.generator;
  rec.discriminator = lc.discriminator;
  rec.total = TotalLoss(lc, w);
  CheckGradients(enc);
  if (c.use_softmax) CheckGradients(cls);
  if (c.use_gan) {
    CheckGradients(gen);
    CheckGradients(critic);
  }

  opt_encoder_.Step();
  if (c.use_softmax) opt_classifier_.Step();
  if (c.use_gan) {
    opt_critic_.Step();
    opt_generator_.Step();
    for (int k = 1; k < c.g_steps_per_d_step; ++k) {
      GeneratorSubstep(emb, batch.labels, rng);
    }
  }
  state_.step = step;
  state_.history.push_back(rec);
  return rec;
}

void Trainer::GeneratorSubstep(const Tensor<float>& embeddings,
                               std::span<const int> labels,
                               std::mt19937_64& rng) {
  const TrainConfig& c = config_;
  const int n = embeddings.shape().n;
  auto& gen = nets_.generator;
  auto& critic = nets_.critic;
  auto& cls = nets_.classifier;
  gen.ZeroGrad();
  const Tensor<float> fake =
      gen.Forward(embeddings, Noise(n, rng), Mode::kTrain);
  Tensor<float> d_fake(fake.shape());

  const Tensor<float> scores = critic.Forward(fake, Mode::kTrain);
  const std::span<const float> s(scores.data(), n);
  const GanLosses<float> gl =
      c.gan_objective == GanObjective::kWassersteinGp
          ? WassersteinLosses<float>(s, s, 0.0f, c.gp_lambda)
          : LogLosses<float>(s, s);
  Tensor<float> seed({n, 1});
  for (int i = 0; i < n; ++i) {
    seed[i] = static_cast<float>(c.weights.generator) * gl.d_gen_d_fake[i];
  }
  AddScaled(d_fake, critic.Backward(seed), 1.0f);
  CheckFinite(gl.generator, "generator loss");

  if (c.use_softmax) {
    const auto saved = SnapshotBuffers(cls);
    const Tensor<float> logits = cls.Forward(fake, Mode::kTrain);
    Tensor<float> g;
    CheckFinite(SoftmaxLoss<float>(logits, labels, &g), "softmax loss");
    for (float& v : g.span()) v *= static_cast<float>(c.weights.softmax);
    AddScaled(d_fake, cls.Backward(g), 1.0f);
    RestoreBuffers(cls, saved);
  }
  gen.Backward(d_fake);
  CheckGradients(gen);
  opt_generator_.Step();
  critic.ZeroGrad();
  cls.ZeroGrad();
}

void Trainer::DumpFakes(const FeatureSet& features,
                        const std::filesystem::path& path) {
  const int count =
      std::min<int>(config_.dump_count, static_cast<int>(features.size()));
  if (count <= 0) return;
  std::vector<std::size_t> picks(count);
  for (int i = 0; i < count; ++i) {
    picks[i] = static_cast<std::size_t>(i) * features.size() / count;
  }
  std::seed_seq seq{config_.seed, static_cast<std::uint64_t>(state_.epoch),
                    std::uint64_t{0xD0}};
  std::mt19937_64 rng(seq);
  const Tensor<float> emb = EncodeSlices(nets_.encoder, features, picks);
  const Tensor<float> fake =
      nets_.generator.Forward(emb, Noise(count, rng), Mode::kInfer);
  FeatureSet out;
  for (int i = 0; i < count; ++i) {
    const FbankSlice& src = features.slice(picks[i]);
    FbankSlice s;
    s.frames = src.frames;
    s.mels = src.mels;
    s.speaker_id = src.speaker_id;
    s.utterance_id = "fake_" + src.utterance_id;
    s.slice_index = src.slice_index;
    const auto row = fake.sample(i);
    s.data.assign(row.begin(), row.end());
    out.Add(std::move(s));
  }
  SaveFeatures(path, out, FeatureKind::kFake);
}

void Trainer::Train(const FeatureSet& features,
                    const std::filesystem::path& out_dir) {
  if (features.num_classes() != num_classes()) {
    throw ConfigError("feature set has " +
                      std::to_string(features.num_classes()) +
                      " speakers but the model was built for " +
                      std::to_string(num_classes()));
  }
  if (features.empty() || features.slice(0).frames != config_.net.frames ||
      features.slice(0).mels != config_.net.mels) {
    throw ConfigError("feature slices do not match frames=" +
                      std::to_string(config_.net.frames) +
                      ", mels=" + std::to_string(config_.net.mels));
  }
  const TripletSampler sampler(config_.plan, features, config_.seed,
                               Margin(config_.margin));
  const bool write = !out_dir.empty();
  const std::filesystem::path ckpt = out_dir / "checkpoint.mtgc";
  std::string last_good = "none";
  std::ofstream csv;
  if (write) {
    std::filesystem::create_directories(out_dir);
    if (state_.step > 0 && std::filesystem::exists(ckpt)) {
      last_good = ckpt.string();
    }
    csv.open(out_dir / "losses.csv", std::ios::trunc);
    if (!csv) {
      throw std::runtime_error("cannot write " +
                               (out_dir / "losses.csv").string());
    }
    csv << kLossCsvHeader << '\n';
    for (const auto& r : state_.history) csv << LossCsvRow(r) << '\n';
    csv.flush();
  }

  std::ofstream audit;
  if (!triple_log_.empty()) {
    const bool fresh = !std::filesystem::exists(triple_log_) || state_.epoch == 0;
    audit.open(triple_log_, fresh ? std::ios::trunc : std::ios::app);
    if (!audit) throw std::runtime_error("cannot write " + triple_log_.string());
    if (fresh) audit << "epoch,anchor,positive,negative\n";
  }
  auto slice_name = [&](std::size_t i) {
    const FbankSlice& s = features.slice(i);
    return fmt::format("{}#{}", s.utterance_id, s.slice_index);
  };

  for (int epoch = state_.epoch; epoch < config_.epochs; ++epoch) {
    EmbedFn embed;
    if (config_.plan.mode == SamplingMode::kSemiHard) {
      embed = [&](std::span<const std::size_t> idx) {
        return EncodeSlices(nets_.encoder, features, idx);
      };
    }
    const EpochTriples et = sampler.SampleEpoch(epoch, embed);
    if (audit.is_open()) {
      for (const Triplet& t : et.triples) {
        audit << epoch << ',' << slice_name(t.anchor) << ','
              << slice_name(t.positive) << ',' << slice_name(t.negative) << '\n';
      }
      audit.flush();
    }
    double sum_total = 0.0;
    const auto batches = SplitBatches(
        et.triples, static_cast<std::size_t>(config_.batch_triplets));
    for (const auto& triples : batches) {
      LossRecord rec;
      try {
        rec = TrainStep(MakeBatch(features, triples));
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " at step " +
                           std::to_string(state_.step + 1) +
                           "; last good checkpoint: " + last_good);
      }
      sum_total += rec.total;
      if (write) csv << LossCsvRow(rec) << '\n';
    }
    state_.epoch = epoch + 1;
    if (write) csv.flush();
    spdlog::info("epoch {}/{}: {} steps, {} semi-hard fallbacks, mean loss {:.5f}",
                 state_.epoch, config_.epochs, batches.size(), et.fallbacks,
                 batches.empty() ? 0.0 : sum_total / batches.size());
    if (!write) continue;
    const bool last = state_.epoch == config_.epochs;
    if (last || (config_.checkpoint_every > 0 &&
                 state_.epoch % config_.checkpoint_every == 0)) {
      SaveCheckpoint(ckpt);
      last_good = ckpt.string();
    }
    if (config_.dump_every > 0 && state_.epoch % config_.dump_every == 0) {
      DumpFakes(features,
                out_dir / fmt::format("fakes_epoch{:03}.mtgf", state_.epoch));
    }
  }
  if (write && !std::filesystem::exists(ckpt)) SaveCheckpoint(ckpt);
}

void Trainer::SaveCheckpoint(const std::filesystem::path& path) const {
  auto& self = const_cast<Trainer&>(*this);
  io::ByteWriter w;
  for (char ch : kCheckpointMagic) w.Put(ch);
  w.Put(kCheckpointVersion);
  w.PutString(ConfigToText(config_));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(num_classes()));
  w.Put<std::int64_t>(state_.step);
  w.Put<std::int32_t>(state_.epoch);
  Network<float>* nets[] = {&self.nets_.encoder, &self.nets_.generator,
                            &self.nets_.critic, &self.nets_.classifier};
  Adam* opts[] = {&self.opt_encoder_, &self.opt_generator_, &self.opt_critic_,
                  &self.opt_classifier_};
  for (int k = 0; k < 4; ++k) {
    NetTensors t = Collect(*nets[k]);
    PutTensors(w, t.param_names, t.params);
    PutTensors(w, t.buffer_names, t.buffers);
    w.Put<std::int64_t>(opts[k]->steps());
    std::vector<Tensor<float>*> m;
    std::vector<Tensor<float>*> v;
    for (auto& x : opts[k]->first_moments()) m.push_back(&x);
    for (auto& x : opts[k]->second_moments()) v.push_back(&x);
    PutTensors(w, t.param_names, m);
    PutTensors(w, t.param_names, v);
  }
  w.Put<std::uint64_t>(state_.history.size());
  for (const auto& r : state_.history) {
    w.Put(r.step);
    w.Put<std::int32_t>(r.epoch);
    w.Put(r.triplet);
    w.Put(r.softmax);
    w.Put(r.generator);
    w.Put(r.discriminator);
    w.Put(r.total);
  }
  io::WriteFileAtomic(path, w.bytes());
}

Trainer Trainer::LoadCheckpoint(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::ReadFile(path);
  io::ByteReader r(bytes);
  for (char ch : kCheckpointMagic) {
    if (r.Get<char>("magic") != ch) {
      throw ParseError(path.string() + " is not a checkpoint (bad magic)", 0);
    }
  }
  const std::uint64_t version_at = r.offset();
  const auto version = r.Get<std::uint16_t>("version");
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " +
                         std::to_string(version),
                     version_at);
  }
  const std::uint64_t config_at = r.offset();
  TrainConfig config;
  try {
    config = ParseConfig(r.GetString("config"));
  } catch (const ConfigError& e) {
    throw ParseError(std::string("checkpoint config: ") + e.what(), config_at);
  }
  const auto classes = r.Get<std::uint32_t>("class count");
  Trainer t(config, static_cast<int>(classes));
  t.state_.step = r.Get<std::int64_t>("step");
  t.state_.epoch = r.Get<std::int32_t>("epoch");
  Network<float>* nets[] = {&t.nets_.encoder, &t.nets_.generator,
                            &t.nets_.critic, &t.nets_.classifier};
  Adam* opts[] = {&t.opt_encoder_, &t.opt_generator_, &t.opt_critic_,
                  &t.opt_classifier_};
  for (int k = 0; k < 4; ++k) {
    NetTensors nt = Collect(*nets[k]);
    GetTensors(r, nt.param_names, nt.params);
    GetTensors(r, nt.buffer_names, nt.buffers);
    opts[k]->set_steps(r.Get<std::int64_t>("optimizer steps"));
    std::vector<Tensor<float>*> m;
    std::vector<Tensor<float>*> v;
    for (auto& x : opts[k]->first_moments()) m.push_back(&x);
    for (auto& x : opts[k]->second_moments()) v.push_back(&x);
    GetTensors(r, nt.param_names, m);
    GetTensors(r, nt.param_names, v);
  }
  const auto n = r.Get<std::uint64_t>("history length");
  for (std::uint64_t i = 0; i < n; ++i) {
    LossRecord rec;
    rec.step = r.Get<std::int64_t>("history step");
    rec.epoch = r.Get<std::int32_t>("history epoch");
    rec.triplet = r.Get<double>("history value");
    rec.softmax = r.Get<double>("history value");
    rec.generator = r.Get<double>("history value");
    rec.discriminator = r.Get<double>("history value");
    rec.total = r.Get<double>("history value");
    t.state_.history.push_back(rec);
  }
  if (!r.AtEnd()) {
    throw ParseError("trailing bytes after checkpoint", r.offset());
  }
  return t;
}

Trainer Trainer::Resume(const std::filesystem::path& path,
                        const TrainConfig& config) {
  Trainer t = LoadCheckpoint(path);
  const auto diffs = StructuralDifferences(t.config_, config);
  if (!diffs.empty()) {
    throw ConfigError(fmt::format(
        "config does not match checkpoint {} in: {}", path.string(),
        fmt::join(diffs, ", ")));
  }
  t.config_.epochs = config.epochs;
  t.config_.checkpoint_every = config.checkpoint_every;
  t.config_.dump_every = config.dump_every;
  t.config_.dump_count = config.dump_count;
  return t;
}

}  // namespace mtgan
