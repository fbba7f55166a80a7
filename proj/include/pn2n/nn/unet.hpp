#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pn2n/nn/layers.hpp"
#include "pn2n/nn/tensor.hpp"

namespace pn2n::nn {

struct UNetConfig {
  int in_channels = 1;
  int out_channels = 1;
  std::vector<int> widths;  // one per encoder block, shallow to deep
  bool batch_norm = false;
  Act hidden = Act::ReLU;
  Act first_block = Act::ReLU;  // activation used inside encoder block 0
  Act output = Act::LeakyReLU01;
};

// conv -> [bn] -> act
template <typename T>
struct ConvUnit {
  Conv2d<T> conv;
  bool has_bn = false;
  BatchNorm2d<T> bn;
  Activation<T> act;

  ConvUnit() = default;
  ConvUnit(const std::string& name, int in_ch, int out_ch, bool use_bn, Act a, Rng& rng)
      : conv(name + ".conv", in_ch, out_ch, 3, rng), has_bn(use_bn), act(a) {
    if (use_bn) bn = BatchNorm2d<T>(name + ".bn", out_ch);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> t = conv.forward(x);
    if (has_bn) t = bn.forward(t, train);
    return act.forward(t);
  }
  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> g = act.backward(gy);
    if (has_bn) g = bn.backward(g);
    return conv.backward(g);
  }
  void collect(std::vector<Param<T>>& out) {
    conv.collect(out);
    if (has_bn) bn.collect(out);
  }
};

// transposed conv -> [bn] -> act
template <typename T>
struct UpUnit {
  ConvTranspose2d<T> up;
  bool has_bn = false;
  BatchNorm2d<T> bn;
  Activation<T> act;

  UpUnit() = default;
  UpUnit(const std::string& name, int in_ch, int out_ch, bool use_bn, Act a, Rng& rng)
      : up(name + ".tconv", in_ch, out_ch, rng), has_bn(use_bn), act(a) {
    if (use_bn) bn = BatchNorm2d<T>(name + ".bn", out_ch);
  }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    Tensor<T> t = up.forward(x);
    if (has_bn) t = bn.forward(t, train);
    return act.forward(t);
  }
  Tensor<T> backward(const Tensor<T>& gy) {
    Tensor<T> g = act.backward(gy);
    if (has_bn) g = bn.backward(g);
    return up.backward(g);
  }
  void collect(std::vector<Param<T>>& out) {
    up.collect(out);
    if (has_bn) bn.collect(out);
  }
};

// Symmetric-skip U-Net. E encoder blocks (two convolutions each, max-pool
// between levels), E-1 decoder blocks (transposed-conv upsampling, skip
// concatenation, two convolutions), 3x3 output convolution.
template <typename T>
class UNet {
 public:
  UNet() = default;

  UNet(const UNetConfig& cfg, std::uint64_t init_seed) : cfg_(cfg) {
    if (cfg.widths.size() < 2) throw std::invalid_argument("UNet: need at least 2 blocks");
    const int E = static_cast<int>(cfg.widths.size());
    Rng rng(derive_seed(init_seed, "unet-init"));

    int prev = cfg.in_channels;
    for (int i = 0; i < E; ++i) {
      const Act a = (i == 0) ? cfg.first_block : cfg.hidden;
      const std::string base = "enc" + std::to_string(i);
      enc_.emplace_back(base + ".0", prev, cfg.widths[i], cfg.batch_norm, a, rng);
      enc_.emplace_back(base + ".1", cfg.widths[i], cfg.widths[i], cfg.batch_norm, a, rng);
      prev = cfg.widths[i];
    }
    pools_.resize(E - 1);
    for (int idx = 0; idx < E - 1; ++idx) {
      const int j = E - 2 - idx;  // decoder level
      const std::string base = "dec" + std::to_string(j);
      ups_.emplace_back(base + ".up", cfg.widths[j + 1], cfg.widths[j], cfg.batch_norm,
                        cfg.hidden, rng);
      dec_.emplace_back(base + ".0", 2 * cfg.widths[j], cfg.widths[j], cfg.batch_norm,
                        cfg.hidden, rng);
      dec_.emplace_back(base + ".1", cfg.widths[j], cfg.widths[j], cfg.batch_norm,
                        cfg.hidden, rng);
    }
    out_conv_ = Conv2d<T>("out.conv", cfg.widths[0], cfg.out_channels, 3, rng);
    out_act_ = Activation<T>(cfg.output);
  }

  const UNetConfig& config() const { return cfg_; }

  int depth_divisor() const { return 1 << (static_cast<int>(cfg_.widths.size()) - 1); }

  Tensor<T> forward(const Tensor<T>& x, bool train) {
    const int E = static_cast<int>(cfg_.widths.size());
    if (x.h % depth_divisor() != 0 || x.w % depth_divisor() != 0) {
      throw std::invalid_argument("UNet::forward: spatial dims must be divisible by " +
                                  std::to_string(depth_divisor()));
    }
    skips_.assign(E - 1, Tensor<T>());
    Tensor<T> t = x;
    for (int i = 0; i < E; ++i) {
      if (i > 0) t = pools_[i - 1].forward(t);
      t = enc_[2 * i].forward(t, train);
      t = enc_[2 * i + 1].forward(t, train);
      if (i < E - 1) skips_[i] = t;
    }
    for (int idx = 0; idx < E - 1; ++idx) {
      const int j = E - 2 - idx;
      t = ups_[idx].forward(t, train);
      t = concat(t, skips_[j]);
      t = dec_[2 * idx].forward(t, train);
      t = dec_[2 * idx + 1].forward(t, train);
    }
    t = out_conv_.forward(t);
    return out_act_.forward(t);
  }

  // Gradient w.r.t. the input given dLoss/dOutput. Parameter gradients
  // accumulate across calls until zero_grad().
  Tensor<T> backward(const Tensor<T>& gy) {
    const int E = static_cast<int>(cfg_.widths.size());
    Tensor<T> g = out_act_.backward(gy);
    g = out_conv_.backward(g);

    std::vector<Tensor<T>> skip_grads(E - 1);
    for (int idx = E - 2; idx >= 0; --idx) {
      const int j = E - 2 - idx;
      g = dec_[2 * idx + 1].backward(g);
      g = dec_[2 * idx].backward(g);
      auto [g_up, g_skip] = split(g, cfg_.widths[j]);
      skip_grads[j] = std::move(g_skip);
      g = ups_[idx].backward(g_up);
    }
    for (int i = E - 1; i >= 0; --i) {
      g = enc_[2 * i + 1].backward(g);
      g = enc_[2 * i].backward(g);
      if (i > 0) {
        g = pools_[i - 1].backward(g);
        Tensor<T>& sg = skip_grads[i - 1];
        for (std::size_t k = 0; k < g.size(); ++k) g.v[k] += sg.v[k];
      }
    }
    return g;
  }

  std::vector<Param<T>> params() {
    std::vector<Param<T>> out;
    for (auto& u : enc_) u.collect(out);
    for (std::size_t idx = 0; idx < ups_.size(); ++idx) {
      ups_[idx].collect(out);
      dec_[2 * idx].collect(out);
      dec_[2 * idx + 1].collect(out);
    }
    out_conv_.collect(out);
    return out;
  }

  void zero_grad() {
    for (auto& p : params()) {
      if (p.grad) std::fill(p.grad->begin(), p.grad->end(), T(0));
    }
  }

 private:
  static Tensor<T> concat(const Tensor<T>& a, const Tensor<T>& b) {
    Tensor<T> out(a.n, a.c + b.c, a.h, a.w);
    for (int bi = 0; bi < a.n; ++bi) {
      std::copy(a.data() + a.offset(bi, 0, 0, 0), a.data() + a.offset(bi, 0, 0, 0) + a.c * a.h * a.w,
                out.data() + out.offset(bi, 0, 0, 0));
      std::copy(b.data() + b.offset(bi, 0, 0, 0), b.data() + b.offset(bi, 0, 0, 0) + b.c * b.h * b.w,
                out.data() + out.offset(bi, a.c, 0, 0));
    }
    return out;
  }

  static std::pair<Tensor<T>, Tensor<T>> split(const Tensor<T>& g, int first_c) {
    Tensor<T> a(g.n, first_c, g.h, g.w);
    Tensor<T> b(g.n, g.c - first_c, g.h, g.w);
    for (int bi = 0; bi < g.n; ++bi) {
      std::copy(g.data() + g.offset(bi, 0, 0, 0), g.data() + g.offset(bi, 0, 0, 0) + a.c * g.h * g.w,
                a.data() + a.offset(bi, 0, 0, 0));
      std::copy(g.data() + g.offset(bi, first_c, 0, 0),
                g.data() + g.offset(bi, first_c, 0, 0) + b.c * g.h * g.w,
                b.data() + b.offset(bi, 0, 0, 0));
    }
    return {std::move(a), std::move(b)};
  }

  UNetConfig cfg_;
  std::vector<ConvUnit<T>> enc_;
  std::vector<MaxPool2d<T>> pools_;
  std::vector<UpUnit<T>> ups_;
  std::vector<ConvUnit<T>> dec_;
  Conv2d<T> out_conv_;
  Activation<T> out_act_;
  std::vector<Tensor<T>> skips_;
};

}  // namespace pn2n::nn
