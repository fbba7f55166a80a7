#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "pn2n/nn/tensor.hpp"
#include "pn2n/rng.hpp"

namespace pn2n::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;

// ---- im2col / col2im --------------------------------------------------

// src: c*h*w, dst: (c*kh*kw) x (oh*ow) row-major with
// oh = (h + 2*pad - kh)/stride + 1.
template <typename T>
void im2col(const T* src, int c, int h, int w, int kh, int kw, int stride, int pad, T* dst) {
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (w + 2 * pad - kw) / stride + 1;
  std::size_t out = 0;
  for (int ic = 0; ic < c; ++ic) {
    const T* plane = src + static_cast<std::size_t>(ic) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < ow; ++ox) dst[out++] = T(0);
            continue;
          }
          const T* row = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            const int ix = ox * stride + kx - pad;
            dst[out++] = (ix >= 0 && ix < w) ? row[ix] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: accumulates cols back onto a c*h*w grid (dst must be
// zeroed by the caller).
template <typename T>
void col2im(const T* cols, int c, int h, int w, int kh, int kw, int stride, int pad, T* dst) {
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (w + 2 * pad - kw) / stride + 1;
  std::size_t in = 0;
  for (int ic = 0; ic < c; ++ic) {
    T* plane = dst + static_cast<std::size_t>(ic) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        for (int oy = 0; oy < oh; ++oy) {
          const int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= h) {
            in += ow;
            continue;
          }
          T* row = plane + static_cast<std::size_t>(iy) * w;
          for (int ox = 0; ox < ow; ++ox, ++in) {
            const int ix = ox * stride + kx - pad;
            if (ix >= 0 && ix < w) row[ix] += cols[in];
          }
        }
      }
    }
  }
}

// ---- layers ------------------------------------------------------------

// 3x3 stride-1 same-padding convolution (kernel size configurable).
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(std::string name, int in_ch, int out_ch, int k, Rng& rng)
      : name_(std::move(name)), ic_(in_ch), oc_(out_ch), k_(k) {
    const int fan_in = ic_ * k_ * k_;
    const T std = static_cast<T>(std::sqrt(2.0 / fan_in));
    weight_.resize(static_cast<std::size_t>(oc_) * fan_in);
    for (T& v : weight_) v = static_cast<T>(rng.normal()) * std;
    bias_.assign(oc_, T(0));
    wgrad_.assign(weight_.size(), T(0));
    bgrad_.assign(bias_.size(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x) {
    x_ = x;
    const int pad = k_ / 2;
    Tensor<T> y(x.n, oc_, x.h, x.w);
    const int hw = x.h * x.w;
    cols_.resize(static_cast<std::size_t>(ic_) * k_ * k_ * hw);
    ConstMatMap<T> W(weight_.data(), oc_, ic_ * k_ * k_);
    for (int b = 0; b < x.n; ++b) {
      im2col(x.data() + x.offset(b, 0, 0, 0), ic_, x.h, x.w, k_, k_, 1, pad, cols_.data());
      ConstMatMap<T> C(cols_.data(), ic_ * k_ * k_, hw);
      MatMap<T> Y(y.data() + y.offset(b, 0, 0, 0), oc_, hw);
      Y.noalias() = W * C;
      for (int o = 0; o < oc_; ++o) Y.row(o).array() += bias_[o];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    const int pad = k_ / 2;
    const int hw = x_.h * x_.w;
    Tensor<T> gx(x_.n, ic_, x_.h, x_.w);
    ConstMatMap<T> W(weight_.data(), oc_, ic_ * k_ * k_);
    MatMap<T> GW(wgrad_.data(), oc_, ic_ * k_ * k_);
    gcols_.resize(static_cast<std::size_t>(ic_) * k_ * k_ * hw);
    for (int b = 0; b < x_.n; ++b) {
      ConstMatMap<T> GY(gy.data() + gy.offset(b, 0, 0, 0), oc_, hw);
      // weight grad needs the forward cols again
      im2col(x_.data() + x_.offset(b, 0, 0, 0), ic_, x_.h, x_.w, k_, k_, 1, pad, cols_.data());
      ConstMatMap<T> C(cols_.data(), ic_ * k_ * k_, hw);
      GW.noalias() += GY * C.transpose();
      for (int o = 0; o < oc_; ++o) bgrad_[o] += GY.row(o).sum();
      MatMap<T> GC(gcols_.data(), ic_ * k_ * k_, hw);
      GC.noalias() = W.transpose() * GY;
      col2im(gcols_.data(), ic_, x_.h, x_.w, k_, k_, 1, pad, gx.data() + gx.offset(b, 0, 0, 0));
    }
    return gx;
  }

  void collect(std::vector<Param<T>>& out) {
    out.push_back({name_ + ".weight", &weight_, &wgrad_, true});
    out.push_back({name_ + ".bias", &bias_, &bgrad_, true});
  }

  int out_channels() const { return oc_; }

 private:
  std::string name_;
  int ic_ = 0, oc_ = 0, k_ = 3;
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  std::vector<T> cols_, gcols_;
  Tensor<T> x_;
};

// Transposed convolution, kernel 3, stride 2, padding 1, output padding 1:
// doubles the spatial size exactly.
template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  ConvTranspose2d(std::string name, int in_ch, int out_ch, Rng& rng)
      : name_(std::move(name)), ic_(in_ch), oc_(out_ch) {
    const int fan_in = ic_ * kK * kK;
    const T std = static_cast<T>(std::sqrt(2.0 / fan_in));
    weight_.resize(static_cast<std::size_t>(ic_) * oc_ * kK * kK);
    for (T& v : weight_) v = static_cast<T>(rng.normal()) * std;
    bias_.assign(oc_, T(0));
    wgrad_.assign(weight_.size(), T(0));
    bgrad_.assign(bias_.size(), T(0));
  }

  Tensor<T> forward(const Tensor<T>& x) {
    x_ = x;
    const int oh = 2 * x.h, ow = 2 * x.w;
    Tensor<T> y(x.n, oc_, oh, ow);
    const int in_hw = x.h * x.w;
    cols_.resize(static_cast<std::size_t>(oc_) * kK * kK * in_hw);
    ConstMatMap<T> W(weight_.data(), ic_, oc_ * kK * kK);
    for (int b = 0; b < x.n; ++b) {
      ConstMatMap<T> X(x.data() + x.offset(b, 0, 0, 0), ic_, in_hw);
      MatMap<T> C(cols_.data(), oc_ * kK * kK, in_hw);
      C.noalias() = W.transpose() * X;
      T* out = y.data() + y.offset(b, 0, 0, 0);
      col2im(cols_.data(), oc_, oh, ow, kK, kK, 2, 1, out);
      for (int o = 0; o < oc_; ++o) {
        T* plane = out + static_cast<std::size_t>(o) * oh * ow;
        for (int i = 0; i < oh * ow; ++i) plane[i] += bias_[o];
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    const int oh = gy.h, ow = gy.w;
    const int in_hw = x_.h * x_.w;
    Tensor<T> gx(x_.n, ic_, x_.h, x_.w);
    ConstMatMap<T> W(weight_.data(), ic_, oc_ * kK * kK);
    MatMap<T> GW(wgrad_.data(), ic_, oc_ * kK * kK);
    gcols_.resize(static_cast<std::size_t>(oc_) * kK * kK * in_hw);
    for (int b = 0; b < x_.n; ++b) {
      im2col(gy.data() + gy.offset(b, 0, 0, 0), oc_, oh, ow, kK, kK, 2, 1, gcols_.data());
      ConstMatMap<T> GC(gcols_.data(), oc_ * kK * kK, in_hw);
      ConstMatMap<T> X(x_.data() + x_.offset(b, 0, 0, 0), ic_, in_hw);
      GW.noalias() += X * GC.transpose();
      MatMap<T> GX(gx.data() + gx.offset(b, 0, 0, 0), ic_, in_hw);
      GX.noalias() = W * GC;
      const T* gplane = gy.data() + gy.offset(b, 0, 0, 0);
      for (int o = 0; o < oc_; ++o) {
        T s = T(0);
        const T* p = gplane + static_cast<std::size_t>(o) * oh * ow;
        for (int i = 0; i < oh * ow; ++i) s += p[i];
        bgrad_[o] += s;
      }
    }
    return gx;
  }

  void collect(std::vector<Param<T>>& out) {
    out.push_back({name_ + ".weight", &weight_, &wgrad_, true});
    out.push_back({name_ + ".bias", &bias_, &bgrad_, true});
  }

 private:
  static constexpr int kK = 3;
  std::string name_;
  int ic_ = 0, oc_ = 0;
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  std::vector<T> cols_, gcols_;
  Tensor<T> x_;
};

// 2x2 max pooling, stride 2. Input dims must be even.
template <typename T>
class MaxPool2d {
 public:
  Tensor<T> forward(const Tensor<T>& x) {
    in_h_ = x.h;
    in_w_ = x.w;
    Tensor<T> y(x.n, x.c, x.h / 2, x.w / 2);
    argmax_.resize(y.size());
    std::size_t o = 0;
    for (int b = 0; b < x.n; ++b) {
      for (int ch = 0; ch < x.c; ++ch) {
        for (int oy = 0; oy < y.h; ++oy) {
          for (int ox = 0; ox < y.w; ++ox, ++o) {
            T best = x.at(b, ch, 2 * oy, 2 * ox);
            std::size_t best_idx = x.offset(b, ch, 2 * oy, 2 * ox);
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                const std::size_t idx = x.offset(b, ch, 2 * oy + dy, 2 * ox + dx);
                if (x.v[idx] > best) {
                  best = x.v[idx];
                  best_idx = idx;
                }
              }
            }
            y.v[o] = best;
            argmax_[o] = best_idx;
          }
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> gx(gy.n, gy.c, in_h_, in_w_);
    for (std::size_t o = 0; o < gy.size(); ++o) gx.v[argmax_[o]] += gy.v[o];
    return gx;
  }

 private:
  int in_h_ = 0, in_w_ = 0;
  std::vector<std::size_t> argmax_;
};

// Per-channel batch normalization over (N, H, W) with running statistics.
template <typename T>
class BatchNorm2d {
 public:
  BatchNorm2d() = default;
  BatchNorm2d(std::string name, int channels)
      : name_(std::move(name)), c_(channels),
        gamma_(channels, T(1)), beta_(channels, T(0)),
        ggrad_(channels, T(0)), bgrad_(channels, T(0)),
        running_mean_(channels, T(0)), running_var_(channels, T(1)) {}

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> y(x.n, x.c, x.h, x.w);
    const std::size_t plane = static_cast<std::size_t>(x.h) * x.w;
    const std::size_t count = static_cast<std::size_t>(x.n) * plane;
    xhat_ = Tensor<T>(x.n, x.c, x.h, x.w);
    invstd_.assign(c_, T(0));
    mean_.assign(c_, T(0));
    count_ = count;

    for (int ch = 0; ch < c_; ++ch) {
      T mean, var;
      if (train) {
        T s = T(0);
        for (int b = 0; b < x.n; ++b) {
          const T* p = x.data() + x.offset(b, ch, 0, 0);
          for (std::size_t i = 0; i < plane; ++i) s += p[i];
        }
        mean = s / static_cast<T>(count);
        T q = T(0);
        for (int b = 0; b < x.n; ++b) {
          const T* p = x.data() + x.offset(b, ch, 0, 0);
          for (std::size_t i = 0; i < plane; ++i) {
            const T d = p[i] - mean;
            q += d * d;
          }
        }
        var = q / static_cast<T>(count);
        running_mean_[ch] = (T(1) - kMomentum) * running_mean_[ch] + kMomentum * mean;
        running_var_[ch] = (T(1) - kMomentum) * running_var_[ch] + kMomentum * var;
      } else {
        mean = running_mean_[ch];
        var = running_var_[ch];
      }
      const T inv = T(1) / std::sqrt(var + kEps);
      mean_[ch] = mean;
      invstd_[ch] = inv;
      for (int b = 0; b < x.n; ++b) {
        const T* p = x.data() + x.offset(b, ch, 0, 0);
        T* xh = xhat_.data() + xhat_.offset(b, ch, 0, 0);
        T* o = y.data() + y.offset(b, ch, 0, 0);
        for (std::size_t i = 0; i < plane; ++i) {
          xh[i] = (p[i] - mean) * inv;
          o[i] = gamma_[ch] * xh[i] + beta_[ch];
        }
      }
    }
    train_ = train;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> gx(gy.n, gy.c, gy.h, gy.w);
    const std::size_t plane = static_cast<std::size_t>(gy.h) * gy.w;
    const T n = static_cast<T>(count_);
    for (int ch = 0; ch < c_; ++ch) {
      T sum_g = T(0), sum_gx = T(0);
      for (int b = 0; b < gy.n; ++b) {
        const T* g = gy.data() + gy.offset(b, ch, 0, 0);
        const T* xh = xhat_.data() + xhat_.offset(b, ch, 0, 0);
        for (std::size_t i = 0; i < plane; ++i) {
          sum_g += g[i];
          sum_gx += g[i] * xh[i];
        }
      }
      ggrad_[ch] += sum_gx;
      bgrad_[ch] += sum_g;
      const T inv = invstd_[ch];
      for (int b = 0; b < gy.n; ++b) {
        const T* g = gy.data() + gy.offset(b, ch, 0, 0);
        const T* xh = xhat_.data() + xhat_.offset(b, ch, 0, 0);
        T* o = gx.data() + gx.offset(b, ch, 0, 0);
        if (train_) {
          for (std::size_t i = 0; i < plane; ++i) {
            o[i] = gamma_[ch] * inv * (g[i] - sum_g / n - xh[i] * sum_gx / n);
          }
        } else {
          for (std::size_t i = 0; i < plane; ++i) o[i] = gamma_[ch] * inv * g[i];
        }
      }
    }
    return gx;
  }

  void collect(std::vector<Param<T>>& out) {
    out.push_back({name_ + ".gamma", &gamma_, &ggrad_, true});
    out.push_back({name_ + ".beta", &beta_, &bgrad_, true});
    out.push_back({name_ + ".running_mean", &running_mean_, nullptr, false});
    out.push_back({name_ + ".running_var", &running_var_, nullptr, false});
  }

 private:
  static constexpr T kEps = static_cast<T>(1e-5);
  static constexpr T kMomentum = static_cast<T>(0.1);
  std::string name_;
  int c_ = 0;
  bool train_ = true;
  std::size_t count_ = 0;
  std::vector<T> gamma_, beta_, ggrad_, bgrad_, running_mean_, running_var_;
  std::vector<T> mean_, invstd_;
  Tensor<T> xhat_;
};

enum class Act { ReLU, LeakyReLU01, Softplus, Sigmoid, Identity };

template <typename T>
class Activation {
 public:
  Activation() = default;
  explicit Activation(Act kind) : kind_(kind) {}

  Tensor<T> forward(const Tensor<T>& x) {
    Tensor<T> y = x;
    switch (kind_) {
      case Act::ReLU:
        for (T& v : y.v) v = v > T(0) ? v : T(0);
        break;
      case Act::LeakyReLU01:
        for (T& v : y.v) v = v > T(0) ? v : static_cast<T>(0.1) * v;
        break;
      case Act::Softplus:
        for (T& v : y.v) v = softplus(v);
        break;
      case Act::Sigmoid:
        for (T& v : y.v) v = sigmoid(v);
        break;
      case Act::Identity:
        break;
    }
    x_ = x;
    y_ = y;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> gx = gy;
    switch (kind_) {
      case Act::ReLU:
        for (std::size_t i = 0; i < gx.size(); ++i) {
          if (x_.v[i] <= T(0)) gx.v[i] = T(0);
        }
        break;
      case Act::LeakyReLU01:
        for (std::size_t i = 0; i < gx.size(); ++i) {
          if (x_.v[i] <= T(0)) gx.v[i] *= static_cast<T>(0.1);
        }
        break;
      case Act::Softplus:
        for (std::size_t i = 0; i < gx.size(); ++i) gx.v[i] *= sigmoid(x_.v[i]);
        break;
      case Act::Sigmoid:
        for (std::size_t i = 0; i < gx.size(); ++i) {
          gx.v[i] *= y_.v[i] * (T(1) - y_.v[i]);
        }
        break;
      case Act::Identity:
        break;
    }
    return gx;
  }

  static T sigmoid(T v) {
    if (v >= T(0)) {
      const T e = std::exp(-v);
      return T(1) / (T(1) + e);
    }
    const T e = std::exp(v);
    return e / (T(1) + e);
  }

  static T softplus(T v) {
    if (v > T(20)) return v;
    if (v < T(-20)) return std::exp(v);
    return std::log1p(std::exp(v));
  }

 private:
  Act kind_ = Act::Identity;
  Tensor<T> x_, y_;
};

}  // namespace pn2n::nn
