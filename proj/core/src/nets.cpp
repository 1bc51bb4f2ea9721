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

#include "mtgan/nets.hpp"

#include <string>

#include "mtgan/error.hpp"

namespace mtgan {

void NetConfig::Validate() const {
  if (frames < 1 || mels < 1) throw ConfigError("input size must be positive");
  if (embed_dim < 1) throw ConfigError("embed_dim must be positive");
  if (noise_dim < 1) throw ConfigError("noise_dim must be positive");
  if (num_classes < 1) throw ConfigError("num_classes must be positive");
  if (kernel < 1 || kernel % 2 == 0) {
    throw ConfigError("kernel size must be odd and positive");
  }
  if (encoder_channels.empty()) {
    throw ConfigError("encoder needs at least one convolution block");
  }
  if (generator_channels.empty()) {
    throw ConfigError("generator needs at least one upsampling block");
  }
  const int up = static_cast<int>(generator_channels.size());
  if (up >= 31 || frames % (1 << up) != 0 || mels % (1 << up) != 0) {
    throw ConfigError("generator with " + std::to_string(up) +
                      " stride-2 blocks cannot produce " +
                      std::to_string(frames) + "x" + std::to_string(mels));
  }
  auto positive = [](const std::vector<int>& v, const char* what) {
    for (int c : v) {
      if (c < 1) throw ConfigError(std::string(what) + " must be positive");
    }
  };
  positive(encoder_channels, "encoder channels");
  positive(generator_channels, "generator channels");
  positive(critic_channels, "critic channels");
  positive(classifier_channels, "classifier channels");
}

template class EncoderNet<float>;
template class GeneratorNet<float>;
template class CriticNet<float>;
template class ClassifierNet<float>;
template class EncoderNet<double>;
template class GeneratorNet<double>;
template class CriticNet<double>;
template class ClassifierNet<double>;

}  // namespace mtgan
