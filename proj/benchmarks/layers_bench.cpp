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

#include <random>

#include <benchmark/benchmark.h>

#include "mtgan/layers.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {
namespace {

Tensor<float> RandomInput(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  Tensor<float> t(shape);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = normal(rng);
  return t;
}

// Args: batch, input side, input channels, output channels.
void BM_Conv2dForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int side = static_cast<int>(state.range(1));
  const int cin = static_cast<int>(state.range(2));
  const int cout = static_cast<int>(state.range(3));
  Conv2d<float> conv(cin, cout, 5, 2, 2);
  std::mt19937_64 rng(1);
  conv.Init(rng);
  const Tensor<float> x = RandomInput({n, cin, side, side}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.Forward(x, Mode::kTrain));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Conv2dForward)
    ->Args({16, 32, 1, 8})
    ->Args({16, 16, 8, 16})
    ->Args({16, 128, 1, 16})
    ->Args({16, 64, 16, 32})
    ->Unit(benchmark::kMicrosecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const int n = 16;
  const int side = static_cast<int>(state.range(0));
  Conv2d<float> conv(8, 16, 5, 2, 2);
  std::mt19937_64 rng(1);
  conv.Init(rng);
  const Tensor<float> x = RandomInput({n, 8, side, side}, 2);
  const Tensor<float> y = conv.Forward(x, Mode::kTrain);
  const Tensor<float> dy = RandomInput(y.shape(), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.Backward(dy));
  }
}
BENCHMARK(BM_Conv2dBackward)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

NetConfig SizedConfig(int side) {
  NetConfig c;
  c.frames = side;
  c.mels = side;
  if (side <= 32) {
    c.embed_dim = 64;
    c.noise_dim = 16;
    c.encoder_channels = {8, 16, 32};
    c.generator_channels = {32, 16, 8};
  }
  return c;
}

// Arg: input side; 128 runs the default five-block encoder.
void BM_EncoderForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const NetConfig cfg = SizedConfig(side);
  EncoderNet<float> encoder(cfg);
  encoder.Init(1);
  const Tensor<float> x = RandomInput({16, 1, side, side}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(encoder.Forward(x, Mode::kInfer));
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_EncoderForward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GeneratorForward(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const NetConfig cfg = SizedConfig(side);
  GeneratorNet<float> generator(cfg);
  generator.Init(1);
  const Tensor<float> e = RandomInput({16, cfg.embed_dim}, 2);
  const Tensor<float> z = RandomInput({16, cfg.noise_dim}, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generator.Forward(e, z, Mode::kInfer));
  }
}
BENCHMARK(BM_GeneratorForward)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mtgan
