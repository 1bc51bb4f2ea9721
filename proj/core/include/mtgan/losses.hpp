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

#ifndef MTGAN_LOSSES_HPP_
#define MTGAN_LOSSES_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mtgan/dual.hpp"
#include "mtgan/error.hpp"
#include "mtgan/nets.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

/// Weights of the four terms of the combined objective.
struct LossWeights {
  double triplet = 0.1;
  double softmax = 0.2;
  double generator = 0.2;
  double discriminator = 0.5;

  void Validate() const;
};

/// Triplet margin in cosine-distance units. For unit vectors
/// |u - v|^2 = 2 * (1 - u.v), so a squared-L2 margin m corresponds to m / 2
/// here.
class Margin {
 public:
  explicit Margin(double alpha = 0.2);
  double value() const { return alpha_; }

 private:
  double alpha_;
};

/// Indices of (anchor, positive, negative) rows into an embedding batch.
struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;

  bool operator==(const Triplet&) const = default;
};

enum class Reduction { kSum, kMean };

/// 1 - a.b for unit vectors; lies in [0, 2].
template <typename T>
T CosineDistance(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine distance of vectors with " +
                     std::to_string(a.size()) + " and " +
                     std::to_string(b.size()) + " elements");
  }
  T dot{};
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return T(1) - dot;
}

/// sum_i max(0, d(a_i, p_i) - d(a_i, n_i) + margin) over indexed triples of
/// an (N, D) embedding batch. When `grad` is given it receives
/// d loss / d embeddings.
template <typename T>
T TripletLoss(const Tensor<T>& embeddings, std::span<const Triplet> triples,
              const Margin& margin, Reduction reduction = Reduction::kSum,
              Tensor<T>* grad = nullptr) {
  const std::size_t n = embeddings.shape().n;
  const std::size_t d = embeddings.shape().per_sample();
  if (grad != nullptr) *grad = Tensor<T>(embeddings.shape());
  if (triples.empty()) return T{};
  const T scale = reduction == Reduction::kMean
                      ? T(1.0 / static_cast<double>(triples.size()))
                      : T(1);
  T total{};
  for (const Triplet& t : triples) {
    if (t.anchor >= n || t.positive >= n || t.negative >= n) {
      throw ShapeError("triplet index out of range for batch of " +
                       std::to_string(n));
    }
    const auto a = embeddings.sample(static_cast<int>(t.anchor));
    const auto p = embeddings.sample(static_cast<int>(t.positive));
    const auto ng = embeddings.sample(static_cast<int>(t.negative));
    const T term = CosineDistance<T>(a, p) - CosineDistance<T>(a, ng) +
                   T(margin.value());
    if (!(term > T{})) continue;
    total += term;
    if (grad != nullptr) {
      // term = a.n - a.p + margin
      auto ga = grad->sample(static_cast<int>(t.anchor));
      auto gp = grad->sample(static_cast<int>(t.positive));
      auto gn = grad->sample(static_cast<int>(t.negative));
      for (std::size_t j = 0; j < d; ++j) {
        ga[j] += scale * (ng[j] - p[j]);
        gp[j] -= scale * a[j];
        gn[j] += scale * a[j];
      }
    }
  }
  return total * scale;
}

/// Batch form: row i of each tensor forms one triplet.
template <typename T>
T TripletLoss(const Tensor<T>& anchors, const Tensor<T>& positives,
              const Tensor<T>& negatives, const Margin& margin,
              Reduction reduction = Reduction::kSum) {
  if (anchors.shape() != positives.shape() ||
      anchors.shape() != negatives.shape()) {
    throw ShapeError("triplet batches differ in shape: " +
                     anchors.shape().str() + ", " + positives.shape().str() +
                     ", " + negatives.shape().str());
  }
  const int n = anchors.shape().n;
  Tensor<T> all = ConcatBatch(ConcatBatch(anchors, positives), negatives);
  std::vector<Triplet> triples(n);
  for (int i = 0; i < n; ++i) {
    triples[i] = {static_cast<std::size_t>(i), static_cast<std::size_t>(n + i),
                  static_cast<std::size_t>(2 * n + i)};
  }
  return TripletLoss<T>(all, triples, margin, reduction);
}

/// Row-wise softmax of (N, C) logits.
template <typename T>
Tensor<T> Softmax(const Tensor<T>& logits) {
  using std::exp;
  const int n = logits.shape().n;
  const std::size_t c = logits.shape().per_sample();
  Tensor<T> out(logits.shape());
  for (int i = 0; i < n; ++i) {
    const auto row = logits.sample(i);
    T mx = row[0];
    for (const T& v : row) mx = v > mx ? v : mx;
    T z{};
    auto o = out.sample(i);
    for (std::size_t j = 0; j < c; ++j) {
      o[j] = exp(row[j] - mx);
      z += o[j];
    }
    for (std::size_t j = 0; j < c; ++j) o[j] /= z;
  }
  return out;
}

/// Mean cross-entropy of (N, C) logits against class labels, computed with
/// a max-shifted log-sum-exp.
template <typename T>
T SoftmaxLoss(const Tensor<T>& logits, std::span<const int> labels,
              Tensor<T>* grad = nullptr) {
  using std::exp;
  using std::log;
  const int n = logits.shape().n;
  const int c = static_cast<int>(logits.shape().per_sample());
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeError("softmax loss: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " rows");
  }
  if (grad != nullptr) *grad = Tensor<T>(logits.shape());
  if (n == 0) return T{};
  T total{};
  const T inv_n = T(1.0 / n);
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= c) {
      throw ShapeError("label " + std::to_string(labels[i]) +
                       " outside [0, " + std::to_string(c) + ")");
    }
    const auto row = logits.sample(i);
    T mx = row[0];
    for (const T& v : row) mx = v > mx ? v : mx;
    T z{};
    for (const T& v : row) z += exp(v - mx);
    const T lse = mx + log(z);
    total += lse - row[labels[i]];
    if (grad != nullptr) {
      auto g = grad->sample(i);
      for (int j = 0; j < c; ++j) {
        g[j] = exp(row[j] - lse) * inv_n;
      }
      g[labels[i]] -= inv_n;
    }
  }
  return total * inv_n;
}

/// Adversarial terms and their derivatives with respect to each score.
template <typename T>
struct GanLosses {
  T generator{};      // L_G
  T discriminator{};  // L_D
  std::vector<T> d_disc_d_real;
  std::vector<T> d_disc_d_fake;
  std::vector<T> d_gen_d_fake;
};

/// WGAN-GP: L_D = mean(fake) - mean(real) + lambda * gp, L_G = -mean(fake).
template <typename T>
GanLosses<T> WassersteinLosses(std::span<const T> real_scores,
                               std::span<const T> fake_scores, T penalty,
                               double lambda) {
  if (real_scores.empty() || fake_scores.empty()) {
    throw ShapeError("adversarial losses need nonempty score batches");
  }
  GanLosses<T> out;
  T mean_real{};
  T mean_fake{};
  for (const T& s : real_scores) mean_real += s;
  for (const T& s : fake_scores) mean_fake += s;
  mean_real /= T(static_cast<double>(real_scores.size()));
  mean_fake /= T(static_cast<double>(fake_scores.size()));
  out.discriminator = mean_fake - mean_real + T(lambda) * penalty;
  out.generator = -mean_fake;
  out.d_disc_d_real.assign(real_scores.size(),
                           T(-1.0 / static_cast<double>(real_scores.size())));
  out.d_disc_d_fake.assign(fake_scores.size(),
                           T(1.0 / static_cast<double>(fake_scores.size())));
  out.d_gen_d_fake.assign(fake_scores.size(),
                          T(-1.0 / static_cast<double>(fake_scores.size())));
  return out;
}

/// Original minimax value function with D = sigmoid(score):
/// L_D = -(mean log D(x) + mean log(1 - D(G(z)))), L_G = mean log(1 - D(G(z))).
template <typename T>
GanLosses<T> LogLosses(std::span<const T> real_scores,
                       std::span<const T> fake_scores) {
  using std::exp;
  using std::log;
  if (real_scores.empty() || fake_scores.empty()) {
    throw ShapeError("adversarial losses need nonempty score batches");
  }
  // softplus(x) = log(1 + e^x), evaluated without overflow.
  auto softplus = [](const T& x) {
    return x > T{} ? x + log(T(1) + exp(-x)) : log(T(1) + exp(x));
  };
  auto sigmoid = [](const T& x) { return T(1) / (T(1) + exp(-x)); };
  const T nr = T(static_cast<double>(real_scores.size()));
  const T nf = T(static_cast<double>(fake_scores.size()));
  GanLosses<T> out;
  T log_d_real{};
  T log_1m_d_fake{};
  for (const T& s : real_scores) {
    log_d_real -= softplus(-s);
    out.d_disc_d_real.push_back(-(T(1) - sigmoid(s)) / nr);
  }
  for (const T& s : fake_scores) {
    log_1m_d_fake -= softplus(s);
    out.d_disc_d_fake.push_back(sigmoid(s) / nf);
    out.d_gen_d_fake.push_back(-sigmoid(s) / nf);
  }
  out.discriminator = -(log_d_real / nr + log_1m_d_fake / nf);
  out.generator = log_1m_d_fake / nf;
  return out;
}

/// Per-sample interpolates eps * real + (1 - eps) * fake.
template <typename T>
Tensor<T> Interpolate(const Tensor<T>& real, const Tensor<T>& fake,
                      std::span<const double> eps) {
  if (real.shape() != fake.shape() ||
      static_cast<int>(eps.size()) != real.shape().n) {
    throw ShapeError("interpolation batches disagree: " + real.shape().str() +
                     " vs " + fake.shape().str());
  }
  Tensor<T> out(real.shape());
  for (int i = 0; i < real.shape().n; ++i) {
    const auto r = real.sample(i);
    const auto f = fake.sample(i);
    auto o = out.sample(i);
    const T e = T(eps[i]);
    for (std::size_t j = 0; j < o.size(); ++j) {
      o[j] = e * r[j] + (T(1) - e) * f[j];
    }
  }
  return out;
}

/// Input gradient of the critic score for each sample (critic has no batch
/// coupling). Parameter gradients of the critic are left untouched.
template <typename T>
Tensor<T> CriticInputGradient(CriticNet<T>& critic, const Tensor<T>& x) {
  auto params = critic.Params();
  std::vector<Tensor<T>> saved;
  saved.reserve(params.size());
  for (auto& p : params) saved.push_back(*p.grad);
  critic.Forward(x, Mode::kTrain);
  Tensor<T> ones({x.shape().n, 1}, T(1));
  Tensor<T> g = critic.Backward(ones);
  for (std::size_t i = 0; i < params.size(); ++i) *params[i].grad = saved[i];
  return g;
}

/// mean_i (|grad_x D(x_i)| - 1)^2 at x_i = eps_i * real_i + (1 - eps_i) *
/// fake_i. If `param_grad_scale` is nonzero, param_grad_scale * d gp /
/// d theta is added to the critic's parameter gradients. That term needs the
/// derivative of the input gradient with respect to the parameters; it is
/// obtained by re-running the critic on dual numbers whose input tangent is
/// the (scaled) input gradient itself.
template <typename T>
T GradientPenalty(CriticNet<T>& critic, const Tensor<T>& real,
                  const Tensor<T>& fake, std::span<const double> eps,
                  double param_grad_scale = 0.0) {
  using std::sqrt;
  const Tensor<T> x = Interpolate(real, fake, eps);
  const Tensor<T> g = CriticInputGradient(critic, x);
  const int n = x.shape().n;
  const std::size_t d = x.shape().per_sample();
  std::vector<T> coeff(n);
  T penalty{};
  for (int i = 0; i < n; ++i) {
    T ss{};
    for (const T& v : g.sample(i)) ss += v * v;
    const T norm = sqrt(ss);
    penalty += (norm - T(1)) * (norm - T(1));
    coeff[i] = norm > T{} ? T(param_grad_scale * 2.0 / n) * (norm - T(1)) / norm
                          : T{};
  }
  penalty /= T(static_cast<double>(n));
  if (param_grad_scale == 0.0) return penalty;

  using D = Dual<T>;
  CriticNet<D> dual(critic.config());
  CopyWeights(critic, dual);
  Tensor<D> xd(x.shape());
  for (int i = 0; i < n; ++i) {
    const auto xs = x.sample(i);
    const auto gs = g.sample(i);
    auto out = xd.sample(i);
    for (std::size_t j = 0; j < d; ++j) out[j] = D(xs[j], coeff[i] * gs[j]);
  }
  dual.ZeroGrad();
  dual.Forward(xd, Mode::kTrain);
  dual.Backward(Tensor<D>({n, 1}, D(1)));
  auto dp = dual.Params();
  auto cp = critic.Params();
  for (std::size_t k = 0; k < cp.size(); ++k) {
    for (std::size_t j = 0; j < cp[k].grad->size(); ++j) {
      (*cp[k].grad)[j] += (*dp[k].grad)[j].d;
    }
  }
  return penalty;
}

struct LossComponents {
  double triplet = 0.0;
  double softmax = 0.0;
  double generator = 0.0;
  double discriminator = 0.0;
};

/// w1 * L_T + w2 * L_S + w3 * L_G + w4 * L_D. Throws NumericError naming the
/// first non-finite component.
double TotalLoss(const LossComponents& c, const LossWeights& w);

/// Throws NumericError if the value is NaN or infinite.
void CheckFinite(double value, const std::string& what);

}  // namespace mtgan

#endif  // MTGAN_LOSSES_HPP_
