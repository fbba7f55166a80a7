#include "pn2n/sn2n.hpp"

#include <cmath>
#include <stdexcept>

#include "pn2n/nn/adam.hpp"
#include "pn2n/nn/checkpoint.hpp"
#include "pn2n/nn_bridge.hpp"
#include "pn2n/rng.hpp"

namespace pn2n {

void Sn2nTrainConfig::validate() const {
  if (lambda1 < 0.0) throw std::invalid_argument("Sn2nTrainConfig: lambda1 must be >= 0");
  if (steps < 1) throw std::invalid_argument("Sn2nTrainConfig: steps must be >= 1");
  if (batch < 1) throw std::invalid_argument("Sn2nTrainConfig: batch must be >= 1");
  if (learning_rate <= 0.0) throw std::invalid_argument("Sn2nTrainConfig: learning rate must be > 0");
}

FramePairSet make_pairs(const FrameSequence& seq, PairRule rule) {
  if (seq.frames.size() < 2) {
    throw std::invalid_argument("make_pairs: need at least 2 frames");
  }
  FramePairSet out;
  if (rule == PairRule::AdjacentPairs) {
    for (std::size_t i = 0; i + 1 < seq.frames.size(); i += 2) {
      out.pairs.emplace_back(seq.frames[i], seq.frames[i + 1]);
    }
    out.provenance = "adjacent";
  } else {
    // one pair: (mean of even-index frames, mean of odd-index frames)
    Image even(seq.frames[0].height(), seq.frames[0].width(), 0.0);
    Image odd = even;
    int n_even = 0, n_odd = 0;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      if (i % 2 == 0) {
        even += seq.frames[i];
        ++n_even;
      } else {
        odd += seq.frames[i];
        ++n_odd;
      }
    }
    even *= 1.0 / n_even;
    odd *= 1.0 / n_odd;
    out.pairs.emplace_back(std::move(even), std::move(odd));
    out.provenance = "odd-even-half-averages";
  }
  return out;
}

FramePairSet make_pairs(const std::vector<FrameSequence>& seqs, PairRule rule) {
  FramePairSet out;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    FramePairSet one = make_pairs(seqs[s], rule);
    for (auto& p : one.pairs) out.pairs.push_back(std::move(p));
    if (s > 0) out.provenance += "+";
    out.provenance += "seq" + std::to_string(s) + ":" + one.provenance;
  }
  return out;
}

double sn2n_loss(const Image& f1, const Image& f2, const Image& y1, const Image& y2,
                 double lambda1) {
  require_same_size(f1, f2, "sn2n_loss");
  require_same_size(f1, y1, "sn2n_loss");
  require_same_size(f1, y2, "sn2n_loss");
  const double n = static_cast<double>(f1.size());
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double d1 = f1.data()[i] - y2.data()[i];
    const double d2 = f2.data()[i] - y1.data()[i];
    const double dc = f1.data()[i] - f2.data()[i];
    a += d1 * d1;
    b += d2 * d2;
    c += dc * dc;
  }
  return (a + b + lambda1 * c) / n;
}

void sn2n_loss_grads(const Image& f1, const Image& f2, const Image& y1, const Image& y2,
                     double lambda1, Image& g1, Image& g2) {
  const double n = static_cast<double>(f1.size());
  g1 = Image(f1.height(), f1.width(), 0.0);
  g2 = Image(f1.height(), f1.width(), 0.0);
  for (std::size_t i = 0; i < f1.size(); ++i) {
    const double dc = f1.data()[i] - f2.data()[i];
    g1.data()[i] = (2.0 * (f1.data()[i] - y2.data()[i]) + 2.0 * lambda1 * dc) / n;
    g2.data()[i] = (2.0 * (f2.data()[i] - y1.data()[i]) - 2.0 * lambda1 * dc) / n;
  }
}

namespace {

nn::UNetConfig denoiser_net_config(const DenoiserSpec& spec) {
  nn::UNetConfig cfg;
  cfg.in_channels = 1;
  cfg.out_channels = 1;
  cfg.widths = spec.widths;
  cfg.batch_norm = false;
  cfg.hidden = nn::Act::ReLU;
  cfg.first_block = nn::Act::ReLU;
  cfg.output = nn::Act::LeakyReLU01;
  return cfg;
}

// Shared training loop; continues from the checkpoint's current weights.
void train_denoiser_steps(DenoiserCheckpoint& ckpt, const FramePairSet& pairs,
                          const Sn2nTrainConfig& cfg) {
  cfg.validate();
  if (pairs.pairs.empty()) throw std::invalid_argument("train_denoiser: empty pair set");

  const int div = ckpt.net.depth_divisor();
  const int valid_h = pairs.pairs[0].first.height();
  const int valid_w = pairs.pairs[0].first.width();

  // pad once up front
  std::vector<std::pair<Image, Image>> padded;
  padded.reserve(pairs.pairs.size());
  for (const auto& [a, b] : pairs.pairs) {
    require_same_size(a, pairs.pairs[0].first, "train_denoiser");
    require_same_size(b, a, "train_denoiser");
    padded.emplace_back(pad_to_multiple(a, div), pad_to_multiple(b, div));
  }

  nn::Adam<float> opt({{ckpt.net.params(), cfg.learning_rate}});
  Rng rng(derive_seed(cfg.seed, "sn2n-batches"));

  for (int step = 0; step < cfg.steps; ++step) {
    ckpt.net.zero_grad();
    double step_loss = 0.0;
    for (int b = 0; b < cfg.batch; ++b) {
      const std::size_t idx =
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(padded.size()));
      const auto& [py1, py2] = padded[std::min(idx, padded.size() - 1)];

      nn::Tensor<float> t = batch_to_tensor({&py1, &py2});
      nn::Tensor<float> f = ckpt.net.forward(t, true);

      Image f1 = tensor_to_image(f, 0, valid_h, valid_w);
      Image f2 = tensor_to_image(f, 1, valid_h, valid_w);
      const Image y1 = tensor_to_image(batch_to_tensor({&py1}), 0, valid_h, valid_w);
      const Image y2 = tensor_to_image(batch_to_tensor({&py2}), 0, valid_h, valid_w);

      step_loss += sn2n_loss(f1, f2, y1, y2, cfg.lambda1);
      Image g1, g2;
      sn2n_loss_grads(f1, f2, y1, y2, cfg.lambda1, g1, g2);

      // gradients are zero on the padded margin
      nn::Tensor<float> gf(f.n, 1, f.h, f.w);
      for (int y = 0; y < valid_h; ++y) {
        for (int x = 0; x < valid_w; ++x) {
          gf.at(0, 0, y, x) = static_cast<float>(g1.at(y, x) / cfg.batch);
          gf.at(1, 0, y, x) = static_cast<float>(g2.at(y, x) / cfg.batch);
        }
      }
      ckpt.net.backward(gf);
    }
    step_loss /= cfg.batch;
    if (!std::isfinite(step_loss)) {
      throw std::runtime_error("sn2n training diverged: non-finite loss at step " +
                               std::to_string(step) + " (learning rate " +
                               std::to_string(cfg.learning_rate) + ")");
    }
    ckpt.loss_trace.push_back(step_loss);
    opt.step();
  }
}

}  // namespace

DenoiserCheckpoint train_denoiser(const FramePairSet& pairs, const DenoiserSpec& spec,
                                  const Sn2nTrainConfig& cfg) {
  DenoiserCheckpoint ckpt{spec, nn::UNet<float>(denoiser_net_config(spec), cfg.seed), {}};
  train_denoiser_steps(ckpt, pairs, cfg);
  return ckpt;
}

DenoiserCheckpoint pretrain_finetune(const DenoiserCheckpoint& pretrained,
                                     const FramePairSet& small_pairs,
                                     const Sn2nTrainConfig& cfg) {
  DenoiserCheckpoint ckpt = pretrained;
  if (cfg.steps == 0) return ckpt;  // finetune 0 steps -> unchanged weights
  train_denoiser_steps(ckpt, small_pairs, cfg);
  return ckpt;
}

Image denoise(const DenoiserCheckpoint& checkpoint, const Image& y) {
  // forward passes do not mutate weights; the activation caches are local to
  // this copy
  nn::UNet<float> net = checkpoint.net;
  const Image padded = pad_to_multiple(y, net.depth_divisor());
  nn::Tensor<float> t = batch_to_tensor({&padded});
  nn::Tensor<float> f = net.forward(t, false);
  return tensor_to_image(f, 0, y.height(), y.width());
}

void save_denoiser(const DenoiserCheckpoint& checkpoint, const std::filesystem::path& path) {
  nn::CheckpointData data;
  data.meta = {{"kind", "sn2n-denoiser"},
               {"widths", checkpoint.spec.widths},
               {"loss_trace_len", checkpoint.loss_trace.size()}};
  nn::UNet<float> net = checkpoint.net;
  for (auto& p : net.params()) {
    data.tensors.emplace_back(p.name, std::vector<float>(p.value->begin(), p.value->end()));
  }
  nn::save_checkpoint_file(path, data);
}

DenoiserCheckpoint load_denoiser(const std::filesystem::path& path) {
  nn::CheckpointData data = nn::load_checkpoint_file(path);
  if (data.meta.value("kind", "") != "sn2n-denoiser") {
    throw std::runtime_error("not an sn2n-denoiser checkpoint: " + path.string());
  }
  DenoiserSpec spec;
  spec.widths = data.meta.at("widths").get<std::vector<int>>();
  DenoiserCheckpoint ckpt{spec, nn::UNet<float>(denoiser_net_config(spec), 0), {}};
  auto params = ckpt.net.params();
  if (params.size() != data.tensors.size()) {
    throw std::runtime_error("incompatible denoiser architecture in " + path.string());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != data.tensors[i].first ||
        params[i].value->size() != data.tensors[i].second.size()) {
      throw std::runtime_error("incompatible denoiser tensor " + data.tensors[i].first);
    }
    params[i].value->assign(data.tensors[i].second.begin(), data.tensors[i].second.end());
  }
  return ckpt;
}

}  // namespace pn2n
