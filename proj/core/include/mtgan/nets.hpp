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

#ifndef MTGAN_NETS_HPP_
#define MTGAN_NETS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mtgan/layers.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

/// Architecture of the four networks. Inputs are frames x mels matrices with
/// one channel; every convolution uses a kernel x kernel window.
struct NetConfig {
  int frames = 128;
  int mels = 128;
  int embed_dim = 512;
  int noise_dim = 128;
  int num_classes = 2;
  int kernel = 5;
  double leaky_slope = 0.2;
  std::vector<int> encoder_channels{16, 32, 64, 128, 256};
  // Widths from the seed block upward; one stride-2 upsampling per entry.
  std::vector<int> generator_channels{256, 128, 64, 32, 16};
  // Empty means a purely linear critic.
  std::vector<int> critic_channels{16, 32, 64, 128, 256};
  std::vector<int> classifier_channels{16, 32, 64};

  /// Throws ConfigError if the generator cannot reach frames x mels.
  void Validate() const;
};

/// Parameters and batch-norm buffers of one network, addressable by name.
template <typename T>
class Network {
 public:
  virtual ~Network() = default;
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  std::vector<ParamRef<T>> Params() {
    std::vector<ParamRef<T>> out;
    body_.CollectParams(name_ + ".", out);
    return out;
  }
  std::vector<BufferRef<T>> Buffers() {
    std::vector<BufferRef<T>> out;
    body_.CollectBuffers(name_ + ".", out);
    return out;
  }
  void ZeroGrad() {
    for (auto& p : Params()) p.grad->Fill(T{});
  }
  void Init(std::uint64_t seed) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(name_.size()),
                      static_cast<std::uint64_t>(name_[0])};
    std::mt19937_64 rng(seq);
    body_.Init(rng);
  }
  std::size_t ParamCount() {
    std::size_t n = 0;
    for (auto& p : Params()) n += p.value->size();
    return n;
  }
  const std::string& name() const { return name_; }
  const NetConfig& config() const { return config_; }

 protected:
  Network(std::string name, NetConfig config)
      : name_(std::move(name)), config_(std::move(config)) {}

  void CheckInput(const Tensor<T>& x) const {
    const Shape& s = x.shape();
    if (s.c != 1 || s.h != config_.frames || s.w != config_.mels) {
      throw ShapeError(name_ + " expects (N,1," +
                       std::to_string(config_.frames) + "," +
                       std::to_string(config_.mels) + ") input, got " +
                       s.str());
    }
  }

  std::string name_;
  NetConfig config_;
  Sequential<T> body_;
};

namespace detail {

inline int Downsampled(int size, int times) {
  for (int i = 0; i < times; ++i) size = (size - 1) / 2 + 1;
  return size;
}

// stride-2 conv blocks; returns flattened feature count.
template <typename T>
int AddConvTrunk(Sequential<T>& body, const NetConfig& cfg,
                 const std::vector<int>& channels, bool batch_norm) {
  int in = 1;
  for (int ch : channels) {
    body.template Add<Conv2d>(in, ch, cfg.kernel, 2, cfg.kernel / 2);
    if (batch_norm) body.template Add<BatchNorm>(ch);
    body.template Add<LeakyRelu>(cfg.leaky_slope);
    in = ch;
  }
  const int depth = static_cast<int>(channels.size());
  body.template Add<Flatten>();
  return in * Downsampled(cfg.frames, depth) * Downsampled(cfg.mels, depth);
}

}  // namespace detail

/// Strided conv stack, one fully connected layer, then L2 normalization.
template <typename T>
class EncoderNet : public Network<T> {
 public:
  explicit EncoderNet(const NetConfig& cfg) : Network<T>("encoder", cfg) {
    cfg.Validate();
    const int features =
        detail::AddConvTrunk(this->body_, cfg, cfg.encoder_channels, true);
    this->body_.template Add<Linear>(features, cfg.embed_dim, 1.0);
    this->body_.template Add<L2Normalize>();
  }

  /// (N,1,frames,mels) -> (N,embed_dim) unit-norm rows.
  Tensor<T> Forward(const Tensor<T>& x, Mode mode) {
    this->CheckInput(x);
    return this->body_.Forward(x, mode);
  }
  Tensor<T> Backward(const Tensor<T>& d_embedding) {
    return this->body_.Backward(d_embedding);
  }
};

/// Maps [embedding, noise] through a linear seed block and stride-2
/// transposed convolutions to one frames x mels channel.
template <typename T>
class GeneratorNet : public Network<T> {
 public:
  explicit GeneratorNet(const NetConfig& cfg) : Network<T>("generator", cfg) {
    cfg.Validate();
    const auto& ch = cfg.generator_channels;
    const int up = static_cast<int>(ch.size());
    const int seed_h = cfg.frames >> up;
    const int seed_w = cfg.mels >> up;
    auto& body = this->body_;
    body.template Add<Linear>(cfg.embed_dim + cfg.noise_dim,
                              ch[0] * seed_h * seed_w);
    body.template Add<Unflatten>(ch[0], seed_h, seed_w);
    body.template Add<BatchNorm>(ch[0]);
    body.template Add<LeakyRelu>(0.0);
    for (int i = 1; i < up; ++i) {
      body.template Add<ConvTranspose2d>(ch[i - 1], ch[i], cfg.kernel, 2,
                                         cfg.kernel / 2);
      body.template Add<BatchNorm>(ch[i]);
      body.template Add<LeakyRelu>(0.0);
    }
    body.template Add<ConvTranspose2d>(ch[up - 1], 1, cfg.kernel, 2,
                                       cfg.kernel / 2, 1.0);
  }

  /// (N,embed_dim) x (N,noise_dim) -> (N,1,frames,mels).
  Tensor<T> Forward(const Tensor<T>& embedding, const Tensor<T>& noise,
                    Mode mode) {
    const auto& cfg = this->config_;
    const Shape& se = embedding.shape();
    const Shape& sz = noise.shape();
    if (static_cast<int>(se.per_sample()) != cfg.embed_dim ||
        static_cast<int>(sz.per_sample()) != cfg.noise_dim || se.n != sz.n) {
      throw ShapeError("generator expects (N," +
                       std::to_string(cfg.embed_dim) + ") embeddings and (N," +
                       std::to_string(cfg.noise_dim) + ") noise, got " +
                       se.str() + " and " + sz.str());
    }
    const int d = cfg.embed_dim + cfg.noise_dim;
    Tensor<T> input({se.n, d});
    for (int i = 0; i < se.n; ++i) {
      auto dst = input.sample(i);
      std::copy(embedding.sample(i).begin(), embedding.sample(i).end(),
                dst.begin());
      std::copy(noise.sample(i).begin(), noise.sample(i).end(),
                dst.begin() + cfg.embed_dim);
    }
    return this->body_.Forward(input, mode);
  }

  /// Returns the gradient with respect to the conditioning embedding.
  Tensor<T> Backward(const Tensor<T>& d_fake) {
    const Tensor<T> d_input = this->body_.Backward(d_fake);
    const int n = d_input.shape().n;
    const int e = this->config_.embed_dim;
    Tensor<T> d_embedding({n, e});
    for (int i = 0; i < n; ++i) {
      std::copy(d_input.sample(i).begin(), d_input.sample(i).begin() + e,
                d_embedding.sample(i).begin());
    }
    return d_embedding;
  }
};

/// WGAN critic: conv stack without batch norm and an unbounded scalar head.
template <typename T>
class CriticNet : public Network<T> {
 public:
  explicit CriticNet(const NetConfig& cfg) : Network<T>("critic", cfg) {
    cfg.Validate();
    const int features =
        detail::AddConvTrunk(this->body_, cfg, cfg.critic_channels, false);
    this->body_.template Add<Linear>(features, 1, 1.0);
  }

  /// (N,1,frames,mels) -> (N,1) scores, one per sample, same order.
  Tensor<T> Forward(const Tensor<T>& x, Mode mode) {
    this->CheckInput(x);
    return this->body_.Forward(x, mode);
  }
  Tensor<T> Backward(const Tensor<T>& d_scores) {
    return this->body_.Backward(d_scores);
  }
};

/// Conv stack and a fully connected layer to num_classes logits.
template <typename T>
class ClassifierNet : public Network<T> {
 public:
  explicit ClassifierNet(const NetConfig& cfg) : Network<T>("classifier", cfg) {
    cfg.Validate();
    const int features =
        detail::AddConvTrunk(this->body_, cfg, cfg.classifier_channels, true);
    this->body_.template Add<Linear>(features, cfg.num_classes, 1.0);
  }

  Tensor<T> Forward(const Tensor<T>& x, Mode mode) {
    this->CheckInput(x);
    return this->body_.Forward(x, mode);
  }
  Tensor<T> Backward(const Tensor<T>& d_logits) {
    return this->body_.Backward(d_logits);
  }
};

/// The four networks of one model.
template <typename T>
struct NetworkSet {
  explicit NetworkSet(const NetConfig& cfg)
      : encoder(cfg), generator(cfg), critic(cfg), classifier(cfg) {}

  /// Deterministic per seed; batch-norm layers start as identity transforms.
  void InitParams(std::uint64_t seed) {
    encoder.Init(seed);
    generator.Init(seed);
    critic.Init(seed);
    classifier.Init(seed);
  }

  EncoderNet<T> encoder;
  GeneratorNet<T> generator;
  CriticNet<T> critic;
  ClassifierNet<T> classifier;
};

/// Copies parameter and buffer values between networks of the same
/// architecture and possibly different scalar types.
template <typename Dst, typename Src>
void CopyWeights(Network<Src>& src, Network<Dst>& dst) {
  auto sp = src.Params();
  auto dp = dst.Params();
  auto sb = src.Buffers();
  auto db = dst.Buffers();
  if (sp.size() != dp.size() || sb.size() != db.size()) {
    throw ShapeError("CopyWeights: architectures differ");
  }
  auto copy = [](const auto& from, auto& to) {
    if (from.shape() != to.shape()) {
      throw ShapeError("CopyWeights: tensor shapes differ");
    }
    for (std::size_t i = 0; i < from.size(); ++i) {
      to[i] = Dst(ValueOf(from[i]));
    }
  };
  for (std::size_t i = 0; i < sp.size(); ++i) copy(*sp[i].value, *dp[i].value);
  for (std::size_t i = 0; i < sb.size(); ++i) copy(*sb[i].value, *db[i].value);
}

}  // namespace mtgan

#endif  // MTGAN_NETS_HPP_
