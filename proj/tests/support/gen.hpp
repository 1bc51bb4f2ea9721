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

#ifndef MTGAN_TESTS_GEN_HPP_
#define MTGAN_TESTS_GEN_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mtgan/tensor.hpp"

namespace mtgan::testing {

// Seeded value generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int Int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  double Real(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double Normal(double sd = 1.0) {
    return std::normal_distribution<double>(0.0, sd)(rng_);
  }
  bool Bool(double p = 0.5) { return Real() < p; }

  std::vector<double> UnitVector(int d) {
    std::vector<double> v(d);
    double ss = 0.0;
    for (double& x : v) {
      x = Normal();
      ss += x * x;
    }
    for (double& x : v) x /= std::sqrt(ss);
    return v;
  }

  template <typename T>
  Tensor<T> UnitRows(int n, int d) {
    Tensor<T> t({n, d});
    for (int i = 0; i < n; ++i) {
      const auto v = UnitVector(d);
      for (int j = 0; j < d; ++j) t.sample(i)[j] = T(v[j]);
    }
    return t;
  }

  template <typename T>
  Tensor<T> NormalTensor(const Shape& s, double sd = 1.0) {
    Tensor<T> t(s);
    for (auto& x : t.span()) x = T(Normal(sd));
    return t;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace mtgan::testing

#endif  // MTGAN_TESTS_GEN_HPP_
