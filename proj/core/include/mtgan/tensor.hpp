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

#ifndef MTGAN_TENSOR_HPP_
#define MTGAN_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtgan/error.hpp"

namespace mtgan {

/// NCHW extent. Feature vectors are carried as (n, features, 1, 1).
struct Shape {
  int n = 0;
  int c = 0;
  int h = 1;
  int w = 1;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t per_sample() const {
    return static_cast<std::size_t>(c) * h * w;
  }
  bool operator==(const Shape&) const = default;
  std::string str() const {
    return "(" + std::to_string(n) + "," + std::to_string(c) + "," +
           std::to_string(h) + "," + std::to_string(w) + ")";
  }
};

template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{})
      : shape_(shape), data_(shape.numel(), fill) {}
  Tensor(Shape shape, std::vector<T> data)
      : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
      throw ShapeError("tensor data size " + std::to_string(data_.size()) +
                       " does not match shape " + shape_.str());
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }

  std::span<T> sample(int i) {
    return std::span<T>(data_).subspan(i * shape_.per_sample(),
                                       shape_.per_sample());
  }
  std::span<const T> sample(int i) const {
    return std::span<const T>(data_).subspan(i * shape_.per_sample(),
                                             shape_.per_sample());
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int n, int c, int h = 0, int w = 0) {
    return data_[((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h +
                  h) * shape_.w + w];
  }
  const T& at(int n, int c, int h = 0, int w = 0) const {
    return data_[((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h +
                  h) * shape_.w + w];
  }

  void Fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  /// Same storage, new extent; element count must match.
  Tensor Reshaped(Shape shape) const {
    if (shape.numel() != shape_.numel()) {
      throw ShapeError("cannot reshape " + shape_.str() + " to " +
                       shape.str());
    }
    return Tensor(shape, data_);
  }

  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename U, typename T>
Tensor<U> TensorCast(const Tensor<T>& src) {
  Tensor<U> out(src.shape());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = static_cast<U>(src[i]);
  return out;
}

/// Stack samples of several tensors with equal per-sample extent.
template <typename T>
Tensor<T> ConcatBatch(const Tensor<T>& a, const Tensor<T>& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.c != sb.c || sa.h != sb.h || sa.w != sb.w) {
    throw ShapeError("ConcatBatch: " + sa.str() + " vs " + sb.str());
  }
  Tensor<T> out({sa.n + sb.n, sa.c, sa.h, sa.w});
  std::copy(a.span().begin(), a.span().end(), out.data());
  std::copy(b.span().begin(), b.span().end(), out.data() + a.size());
  return out;
}

/// Rows [begin, end) of the batch dimension.
template <typename T>
Tensor<T> SliceBatch(const Tensor<T>& t, int begin, int end) {
  Shape s = t.shape();
  s.n = end - begin;
  Tensor<T> out(s);
  const auto ps = t.shape().per_sample();
  std::copy(t.data() + begin * ps, t.data() + end * ps, out.data());
  return out;
}

}  // namespace mtgan

#endif  // MTGAN_TENSOR_HPP_
