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

#include "mtgan/losses.hpp"

#include <cmath>
#include <string>

#include "mtgan/error.hpp"

namespace mtgan {

void LossWeights::Validate() const {
  const double w[] = {triplet, softmax, generator, discriminator};
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("loss weights must be finite and nonnegative");
    }
  }
}

Margin::Margin(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("triplet margin must be finite and nonnegative, got " +
                      std::to_string(alpha));
  }
}

void CheckFinite(double value, const std::string& what) {
  if (!std::isfinite(value)) {
    throw NumericError(what + " is not finite (" + std::to_string(value) +
                       ")");
  }
}

double TotalLoss(const LossComponents& c, const LossWeights& w) {
  CheckFinite(c.triplet, "triplet loss");
  CheckFinite(c.softmax, "softmax loss");
  CheckFinite(c.generator, "generator loss");
  CheckFinite(c.discriminator, "discriminator loss");
  return w.triplet * c.triplet + w.softmax * c.softmax +
         w.generator * c.generator + w.discriminator * c.discriminator;
}

}  // namespace mtgan
