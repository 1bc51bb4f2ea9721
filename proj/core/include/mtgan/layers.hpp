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

#ifndef MTGAN_LAYERS_HPP_
#define MTGAN_LAYERS_HPP_

#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mtgan/dual.hpp"
#include "mtgan/error.hpp"
#include "mtgan/linalg.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {

/// Training uses batch statistics in batch norm; inference uses running ones.
enum class Mode { kTrain, kInfer };

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value;
  Tensor<T>* grad;
};

template <typename T>
struct BufferRef {
  std::string name;
  Tensor<T>* value;
};

/// A differentiable stage. Forward caches what Backward needs; Backward
/// accumulates parameter gradients and returns the input gradient. Backward
/// may be called more than once per Forward.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> Forward(const Tensor<T>& x, Mode mode) = 0;
  virtual Tensor<T> Backward(const Tensor<T>& dy) = 0;
  virtual void CollectParams(const std::string& /*prefix*/,
                             std::vector<ParamRef<T>>& /*out*/) {}
  virtual void CollectBuffers(const std::string& /*prefix*/,
                              std::vector<BufferRef<T>>& /*out*/) {}
  virtual void Init(std::mt19937_64& /*rng*/) {}
};

struct ConvGeometry {
  int channels = 0;
  int in_h = 0;
  int in_w = 0;
  int kernel = 5;
  int stride = 1;
  int pad = 0;
  int out_h = 0;
  int out_w = 0;

  static ConvGeometry Make(int channels, int in_h, int in_w, int kernel,
                           int stride, int pad) {
    ConvGeometry g{channels, in_h, in_w, kernel, stride, pad, 0, 0};
    g.out_h = (in_h + 2 * pad - kernel) / stride + 1;
    g.out_w = (in_w + 2 * pad - kernel) / stride + 1;
    if (g.out_h <= 0 || g.out_w <= 0) {
      throw ShapeError("convolution input " + std::to_string(in_h) + "x" +
                       std::to_string(in_w) + " too small for kernel " +
                       std::to_string(kernel));
    }
    return g;
  }
  int col_rows() const { return channels * kernel * kernel; }
  int col_cols() const { return out_h * out_w; }
};

/// Writes the patch matrix of one image into columns [offset, offset +
/// out_h*out_w) of a row-major buffer with leading dimension ld.
template <typename T>
void Im2Col(const ConvGeometry& g, const T* image, T* cols, std::size_t ld,
            std::size_t offset) {
  const int k = g.kernel;
  for (int c = 0; c < g.channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        T* row = cols + static_cast<std::size_t>((c * k + ky) * k + kx) * ld +
                 offset;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          T* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= g.in_h) {
            for (int ox = 0; ox < g.out_w; ++ox) dst[ox] = T{};
            continue;
          }
          const T* src = image + (static_cast<std::size_t>(c) * g.in_h + iy) *
                                     g.in_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            dst[ox] = (ix >= 0 && ix < g.in_w) ? src[ix] : T{};
          }
        }
      }
    }
  }
}

/// Adjoint of Im2Col: scatters columns back, accumulating into image.
template <typename T>
void Col2Im(const ConvGeometry& g, const T* cols, std::size_t ld,
            std::size_t offset, T* image) {
  const int k = g.kernel;
  for (int c = 0; c < g.channels; ++c) {
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* row = cols +
                       static_cast<std::size_t>((c * k + ky) * k + kx) * ld +
                       offset;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.in_h) continue;
          const T* src = row + oy * g.out_w;
          T* dst = image + (static_cast<std::size_t>(c) * g.in_h + iy) * g.in_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.in_w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

namespace detail {

template <typename T>
void FillNormal(Tensor<T>& t, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = T(dist(rng));
}

// (N, C, HW) <-> (C, N*HW) channel-major matrix used by the batched GEMMs.
template <typename T>
std::vector<T> ToChannelMajor(const Tensor<T>& x) {
  const Shape& s = x.shape();
  const std::size_t hw = static_cast<std::size_t>(s.h) * s.w;
  std::vector<T> m(x.size());
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const T* src = x.data() + (static_cast<std::size_t>(n) * s.c + c) * hw;
      T* dst = m.data() + (static_cast<std::size_t>(c) * s.n + n) * hw;
      std::copy(src, src + hw, dst);
    }
  }
  return m;
}

template <typename T>
void FromChannelMajor(const std::vector<T>& m, Tensor<T>& x) {
  const Shape& s = x.shape();
  const std::size_t hw = static_cast<std::size_t>(s.h) * s.w;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const T* src = m.data() + (static_cast<std::size_t>(c) * s.n + n) * hw;
      T* dst = x.data() + (static_cast<std::size_t>(n) * s.c + c) * hw;
      std::copy(src, src + hw, dst);
    }
  }
}

}  // namespace detail

/// Strided convolution, square kernel, zero padding.
template <typename T>
class Conv2d : public Layer<T> {
 public:
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad,
         double init_gain = std::sqrt(2.0))
      : in_channels_(in_channels),
        out_channels_(out_channels),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        init_gain_(init_gain),
        weight_({out_channels, in_channels, kernel, kernel}),
        bias_({out_channels, 1}),
        dweight_(weight_.shape()),
        dbias_(bias_.shape()) {}

  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    const Shape& s = x.shape();
    if (s.c != in_channels_) {
      throw ShapeError("Conv2d expects " + std::to_string(in_channels_) +
                       " input channels, got " + s.str());
    }
    geom_ = ConvGeometry::Make(s.c, s.h, s.w, kernel_, stride_, pad_);
    batch_ = s.n;
    const std::size_t hw = geom_.col_cols();
    const std::size_t ld = hw * batch_;
    cols_.assign(static_cast<std::size_t>(geom_.col_rows()) * ld, T{});
    for (int n = 0; n < batch_; ++n) {
      Im2Col(geom_, x.sample(n).data(), cols_.data(), ld, n * hw);
    }
    std::vector<T> y(static_cast<std::size_t>(out_channels_) * ld);
    Gemm(false, false, out_channels_, static_cast<int>(ld), geom_.col_rows(),
         weight_.data(), cols_.data(), y.data());
    for (int c = 0; c < out_channels_; ++c) {
      T* row = y.data() + c * ld;
      for (std::size_t i = 0; i < ld; ++i) row[i] += bias_[c];
    }
    Tensor<T> out({batch_, out_channels_, geom_.out_h, geom_.out_w});
    detail::FromChannelMajor(y, out);
    return out;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    const std::size_t hw = geom_.col_cols();
    const std::size_t ld = hw * batch_;
    std::vector<T> dym = detail::ToChannelMajor(dy);
    Gemm(false, true, out_channels_, geom_.col_rows(), static_cast<int>(ld),
         dym.data(), cols_.data(), dweight_.data(), true);
    for (int c = 0; c < out_channels_; ++c) {
      T acc{};
      const T* row = dym.data() + c * ld;
      for (std::size_t i = 0; i < ld; ++i) acc += row[i];
      dbias_[c] += acc;
    }
    std::vector<T> dcols(static_cast<std::size_t>(geom_.col_rows()) * ld);
    Gemm(true, false, geom_.col_rows(), static_cast<int>(ld), out_channels_,
         weight_.data(), dym.data(), dcols.data());
    Tensor<T> dx({batch_, in_channels_, geom_.in_h, geom_.in_w});
    for (int n = 0; n < batch_; ++n) {
      Col2Im(geom_, dcols.data(), ld, n * hw, dx.sample(n).data());
    }
    return dx;
  }

  void CollectParams(const std::string& prefix,
                     std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + "weight", &weight_, &dweight_});
    out.push_back({prefix + "bias", &bias_, &dbias_});
  }

  void Init(std::mt19937_64& rng) override {
    const double fan_in = static_cast<double>(in_channels_) * kernel_ * kernel_;
    detail::FillNormal(weight_, init_gain_ / std::sqrt(fan_in), rng);
    bias_.Fill(T{});
  }

 private:
  int in_channels_;
  int out_channels_;
  int kernel_;
  int stride_;
  int pad_;
  double init_gain_;
  Tensor<T> weight_;
  Tensor<T> bias_;
  Tensor<T> dweight_;
  Tensor<T> dbias_;
  ConvGeometry geom_;
  int batch_ = 0;
  std::vector<T> cols_;
};

/// Fractionally strided convolution producing exactly in * stride outputs
/// per spatial axis. It is the adjoint of a Conv2d with the same kernel,
/// stride and padding applied to the larger image.
template <typename T>
class ConvTranspose2d : public Layer<T> {
 public:
  ConvTranspose2d(int in_channels, int out_channels, int kernel, int stride,
                  int pad, double init_gain = std::sqrt(2.0))
      : in_channels_(in_channels),
        out_channels_(out_channels),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        init_gain_(init_gain),
        weight_({in_channels, out_channels, kernel, kernel}),
        bias_({out_channels, 1}),
        dweight_(weight_.shape()),
        dbias_(bias_.shape()) {}

  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    const Shape& s = x.shape();
    if (s.c != in_channels_) {
      throw ShapeError("ConvTranspose2d expects " +
                       std::to_string(in_channels_) + " input channels, got " +
                       s.str());
    }
    geom_ = ConvGeometry::Make(out_channels_, s.h * stride_, s.w * stride_,
                               kernel_, stride_, pad_);
    if (geom_.out_h != s.h || geom_.out_w != s.w) {
      throw ShapeError("ConvTranspose2d geometry does not invert for input " +
                       s.str());
    }
    batch_ = s.n;
    const std::size_t hw = geom_.col_cols();
    const std::size_t ld = hw * batch_;
    xm_ = detail::ToChannelMajor(x);
    std::vector<T> cols(static_cast<std::size_t>(geom_.col_rows()) * ld);
    Gemm(true, false, geom_.col_rows(), static_cast<int>(ld), in_channels_,
         weight_.data(), xm_.data(), cols.data());
    Tensor<T> out({batch_, out_channels_, geom_.in_h, geom_.in_w});
    for (int n = 0; n < batch_; ++n) {
      Col2Im(geom_, cols.data(), ld, n * hw, out.sample(n).data());
    }
    const std::size_t plane = static_cast<std::size_t>(geom_.in_h) * geom_.in_w;
    for (int n = 0; n < batch_; ++n) {
      for (int c = 0; c < out_channels_; ++c) {
        T* p = &out.at(n, c);
        for (std::size_t i = 0; i < plane; ++i) p[i] += bias_[c];
      }
    }
    return out;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    const std::size_t hw = geom_.col_cols();
    const std::size_t ld = hw * batch_;
    std::vector<T> dcols(static_cast<std::size_t>(geom_.col_rows()) * ld);
    for (int n = 0; n < batch_; ++n) {
      Im2Col(geom_, dy.sample(n).data(), dcols.data(), ld, n * hw);
    }
    Gemm(false, true, in_channels_, geom_.col_rows(), static_cast<int>(ld),
         xm_.data(), dcols.data(), dweight_.data(), true);
    const std::size_t plane = static_cast<std::size_t>(geom_.in_h) * geom_.in_w;
    for (int c = 0; c < out_channels_; ++c) {
      T acc{};
      for (int n = 0; n < batch_; ++n) {
        const T* p = &dy.at(n, c);
        for (std::size_t i = 0; i < plane; ++i) acc += p[i];
      }
      dbias_[c] += acc;
    }
    std::vector<T> dxm(static_cast<std::size_t>(in_channels_) * ld);
    Gemm(false, false, in_channels_, static_cast<int>(ld), geom_.col_rows(),
         weight_.data(), dcols.data(), dxm.data());
    Tensor<T> dx({batch_, in_channels_, geom_.out_h, geom_.out_w});
    detail::FromChannelMajor(dxm, dx);
    return dx;
  }

  void CollectParams(const std::string& prefix,
                     std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + "weight", &weight_, &dweight_});
    out.push_back({prefix + "bias", &bias_, &dbias_});
  }

  void Init(std::mt19937_64& rng) override {
    const double fan_in = static_cast<double>(in_channels_) * kernel_ *
                          kernel_ / (stride_ * stride_);
    detail::FillNormal(weight_, init_gain_ / std::sqrt(fan_in), rng);
    bias_.Fill(T{});
  }

 private:
  int in_channels_;
  int out_channels_;
  int kernel_;
  int stride_;
  int pad_;
  double init_gain_;
  Tensor<T> weight_;
  Tensor<T> bias_;
  Tensor<T> dweight_;
  Tensor<T> dbias_;
  ConvGeometry geom_;
  int batch_ = 0;
  std::vector<T> xm_;
};

/// Fully connected layer over flattened samples.
template <typename T>
class Linear : public Layer<T> {
 public:
  Linear(int in_features, int out_features, double init_gain = std::sqrt(2.0))
      : in_(in_features),
        out_(out_features),
        init_gain_(init_gain),
        weight_({out_features, in_features}),
        bias_({out_features, 1}),
        dweight_(weight_.shape()),
        dbias_(bias_.shape()) {}

  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    if (static_cast<int>(x.shape().per_sample()) != in_) {
      throw ShapeError("Linear expects " + std::to_string(in_) +
                       " features per sample, got " + x.shape().str());
    }
    x_ = x;
    const int n = x.shape().n;
    Tensor<T> y({n, out_});
    Gemm(false, true, n, out_, in_, x.data(), weight_.data(), y.data());
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < out_; ++j) y.at(i, j) += bias_[j];
    }
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    const int n = x_.shape().n;
    Gemm(true, false, out_, in_, n, dy.data(), x_.data(), dweight_.data(),
         true);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < out_; ++j) dbias_[j] += dy.at(i, j);
    }
    Tensor<T> dx(x_.shape());
    Gemm(false, false, n, in_, out_, dy.data(), weight_.data(), dx.data());
    return dx;
  }

  void CollectParams(const std::string& prefix,
                     std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + "weight", &weight_, &dweight_});
    out.push_back({prefix + "bias", &bias_, &dbias_});
  }

  void Init(std::mt19937_64& rng) override {
    detail::FillNormal(weight_, init_gain_ / std::sqrt(double(in_)), rng);
    bias_.Fill(T{});
  }

 private:
  int in_;
  int out_;
  double init_gain_;
  Tensor<T> weight_;
  Tensor<T> bias_;
  Tensor<T> dweight_;
  Tensor<T> dbias_;
  Tensor<T> x_;
};

/// Per-channel batch normalization over (N, H, W).
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  explicit BatchNorm(int channels, double eps = 1e-5, double momentum = 0.1)
      : channels_(channels),
        eps_(eps),
        momentum_(momentum),
        gamma_({channels, 1}, T(1)),
        beta_({channels, 1}),
        dgamma_(gamma_.shape()),
        dbeta_(beta_.shape()),
        running_mean_({channels, 1}),
        running_var_({channels, 1}, T(1)) {}

  Tensor<T> Forward(const Tensor<T>& x, Mode mode) override {
    using std::sqrt;
    const Shape& s = x.shape();
    if (s.c != channels_) {
      throw ShapeError("BatchNorm expects " + std::to_string(channels_) +
                       " channels, got " + s.str());
    }
    mode_ = mode;
    const std::size_t plane = static_cast<std::size_t>(s.h) * s.w;
    const std::size_t count = plane * s.n;
    xhat_ = Tensor<T>(s);
    inv_std_.assign(channels_, T{});
    Tensor<T> y(s);
    for (int c = 0; c < channels_; ++c) {
      T mean{};
      T var{};
      if (mode == Mode::kTrain) {
        for (int n = 0; n < s.n; ++n) {
          const T* p = &x.at(n, c);
          for (std::size_t i = 0; i < plane; ++i) mean += p[i];
        }
        mean /= T(static_cast<double>(count));
        for (int n = 0; n < s.n; ++n) {
          const T* p = &x.at(n, c);
          for (std::size_t i = 0; i < plane; ++i) {
            const T d = p[i] - mean;
            var += d * d;
          }
        }
        var /= T(static_cast<double>(count));
        const double m = momentum_;
        const double unbiased =
            count > 1 ? static_cast<double>(count) / (count - 1) : 1.0;
        running_mean_[c] = T(1.0 - m) * running_mean_[c] + T(m) * mean;
        running_var_[c] =
            T(1.0 - m) * running_var_[c] + T(m * unbiased) * var;
      } else {
        mean = running_mean_[c];
        var = running_var_[c];
      }
      const T inv = T(1) / sqrt(var + T(eps_));
      inv_std_[c] = inv;
      for (int n = 0; n < s.n; ++n) {
        const T* p = &x.at(n, c);
        T* xh = &xhat_.at(n, c);
        T* out = &y.at(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          xh[i] = (p[i] - mean) * inv;
          out[i] = gamma_[c] * xh[i] + beta_[c];
        }
      }
    }
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    const Shape& s = xhat_.shape();
    const std::size_t plane = static_cast<std::size_t>(s.h) * s.w;
    const T count = T(static_cast<double>(plane * s.n));
    Tensor<T> dx(s);
    for (int c = 0; c < channels_; ++c) {
      T sum_dy{};
      T sum_dy_xhat{};
      for (int n = 0; n < s.n; ++n) {
        const T* g = &dy.at(n, c);
        const T* xh = &xhat_.at(n, c);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_dy += g[i];
          sum_dy_xhat += g[i] * xh[i];
        }
      }
      dgamma_[c] += sum_dy_xhat;
      dbeta_[c] += sum_dy;
      const T scale = gamma_[c] * inv_std_[c];
      for (int n = 0; n < s.n; ++n) {
        const T* g = &dy.at(n, c);
        const T* xh = &xhat_.at(n, c);
        T* out = &dx.at(n, c);
        if (mode_ == Mode::kTrain) {
          for (std::size_t i = 0; i < plane; ++i) {
            out[i] = scale / count *
                     (count * g[i] - sum_dy - xh[i] * sum_dy_xhat);
          }
        } else {
          for (std::size_t i = 0; i < plane; ++i) out[i] = scale * g[i];
        }
      }
    }
    return dx;
  }

  void CollectParams(const std::string& prefix,
                     std::vector<ParamRef<T>>& out) override {
    out.push_back({prefix + "gamma", &gamma_, &dgamma_});
    out.push_back({prefix + "beta", &beta_, &dbeta_});
  }
  void CollectBuffers(const std::string& prefix,
                      std::vector<BufferRef<T>>& out) override {
    out.push_back({prefix + "running_mean", &running_mean_});
    out.push_back({prefix + "running_var", &running_var_});
  }
  void Init(std::mt19937_64&) override {
    gamma_.Fill(T(1));
    beta_.Fill(T{});
    running_mean_.Fill(T{});
    running_var_.Fill(T(1));
  }

 private:
  int channels_;
  double eps_;
  double momentum_;
  Tensor<T> gamma_;
  Tensor<T> beta_;
  Tensor<T> dgamma_;
  Tensor<T> dbeta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Mode mode_ = Mode::kTrain;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

/// max(x, slope * x); slope 0 gives ReLU.
template <typename T>
class LeakyRelu : public Layer<T> {
 public:
  explicit LeakyRelu(double slope) : slope_(slope) {}

  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    x_ = x;
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = x[i] > T{} ? x[i] : T(slope_) * x[i];
    }
    return y;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i) {
      dx[i] = x_[i] > T{} ? dy[i] : T(slope_) * dy[i];
    }
    return dx;
  }

 private:
  double slope_;
  Tensor<T> x_;
};

/// (N, C, H, W) -> (N, C*H*W, 1, 1).
template <typename T>
class Flatten : public Layer<T> {
 public:
  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return x.Reshaped({in_shape_.n, static_cast<int>(in_shape_.per_sample())});
  }
  Tensor<T> Backward(const Tensor<T>& dy) override {
    return dy.Reshaped(in_shape_);
  }

 private:
  Shape in_shape_;
};

/// (N, C*H*W) -> (N, C, H, W).
template <typename T>
class Unflatten : public Layer<T> {
 public:
  Unflatten(int c, int h, int w) : c_(c), h_(h), w_(w) {}
  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    in_shape_ = x.shape();
    return x.Reshaped({in_shape_.n, c_, h_, w_});
  }
  Tensor<T> Backward(const Tensor<T>& dy) override {
    return dy.Reshaped(in_shape_);
  }

 private:
  int c_, h_, w_;
  Shape in_shape_;
};

/// Scales every sample to unit L2 norm.
template <typename T>
class L2Normalize : public Layer<T> {
 public:
  Tensor<T> Forward(const Tensor<T>& x, Mode) override {
    using std::sqrt;
    const int n = x.shape().n;
    const std::size_t d = x.shape().per_sample();
    y_ = Tensor<T>(x.shape());
    norms_.assign(n, T{});
    for (int i = 0; i < n; ++i) {
      const auto xs = x.sample(i);
      T ss{};
      for (std::size_t j = 0; j < d; ++j) ss += xs[j] * xs[j];
      T norm = sqrt(ss);
      if (norm < T(1e-12)) norm = T(1e-12);
      norms_[i] = norm;
      auto ys = y_.sample(i);
      for (std::size_t j = 0; j < d; ++j) ys[j] = xs[j] / norm;
    }
    return y_;
  }

  Tensor<T> Backward(const Tensor<T>& dy) override {
    const int n = dy.shape().n;
    const std::size_t d = dy.shape().per_sample();
    Tensor<T> dx(dy.shape());
    for (int i = 0; i < n; ++i) {
      const auto ys = y_.sample(i);
      const auto gs = dy.sample(i);
      T dot{};
      for (std::size_t j = 0; j < d; ++j) dot += ys[j] * gs[j];
      auto out = dx.sample(i);
      for (std::size_t j = 0; j < d; ++j) {
        out[j] = (gs[j] - ys[j] * dot) / norms_[i];
      }
    }
    return dx;
  }

 private:
  Tensor<T> y_;
  std::vector<T> norms_;
};

template <typename T>
class Sequential {
 public:
  template <template <typename> class L, typename... Args>
  void Add(Args&&... args) {
    layers_.push_back(std::make_unique<L<T>>(std::forward<Args>(args)...));
  }

  Tensor<T> Forward(const Tensor<T>& x, Mode mode) {
    Tensor<T> h = x;
    for (auto& layer : layers_) h = layer->Forward(h, mode);
    return h;
  }

  Tensor<T> Backward(const Tensor<T>& dy) {
    Tensor<T> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
      g = (*it)->Backward(g);
    }
    return g;
  }

  void CollectParams(const std::string& prefix,
                     std::vector<ParamRef<T>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i]->CollectParams(prefix + std::to_string(i) + ".", out);
    }
  }
  void CollectBuffers(const std::string& prefix,
                      std::vector<BufferRef<T>>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      layers_[i]->CollectBuffers(prefix + std::to_string(i) + ".", out);
    }
  }
  void Init(std::mt19937_64& rng) {
    for (auto& layer : layers_) layer->Init(rng);
  }
  std::size_t size() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace mtgan

#endif  // MTGAN_LAYERS_HPP_
