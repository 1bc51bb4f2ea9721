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

#ifndef MTGAN_INFERENCE_HPP_
#define MTGAN_INFERENCE_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "mtgan/error.hpp"
#include "mtgan/features.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

/// Stacks the chosen slices into an (N, 1, frames, mels) batch.
inline Tensor<float> SlicesToTensor(const FeatureSet& features,
                                    std::span<const std::size_t> indices) {
  if (indices.empty()) throw ShapeError("no slices to stack");
  const FbankSlice& first = features.slice(indices[0]);
  Tensor<float> out({static_cast<int>(indices.size()), 1, first.frames,
                     first.mels});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const FbankSlice& s = features.slice(indices[i]);
    if (s.frames != first.frames || s.mels != first.mels) {
      throw ShapeError("slices of different sizes in one batch");
    }
    std::copy(s.data.begin(), s.data.end(),
              out.sample(static_cast<int>(i)).begin());
  }
  return out;
}

/// Inference-mode embeddings of the chosen slices, computed in chunks.
inline Tensor<float> EncodeSlices(EncoderNet<float>& encoder,
                                  const FeatureSet& features,
                                  std::span<const std::size_t> indices,
                                  std::size_t chunk = 64) {
  const int dim = encoder.config().embed_dim;
  Tensor<float> out({static_cast<int>(indices.size()), dim});
  for (std::size_t begin = 0; begin < indices.size(); begin += chunk) {
    const std::size_t end = std::min(indices.size(), begin + chunk);
    const Tensor<float> x =
        SlicesToTensor(features, indices.subspan(begin, end - begin));
    const Tensor<float> e = encoder.Forward(x, Mode::kInfer);
    std::copy(e.data(), e.data() + e.size(),
              out.data() + begin * static_cast<std::size_t>(dim));
  }
  return out;
}

inline Tensor<float> EncodeAll(EncoderNet<float>& encoder,
                               const FeatureSet& features) {
  std::vector<std::size_t> all(features.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return EncodeSlices(encoder, features, all);
}

}  // namespace mtgan

#endif  // MTGAN_INFERENCE_HPP_
