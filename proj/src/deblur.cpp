#include "pn2n/deblur.hpp"

#include <cmath>
#include <stdexcept>

#include "pn2n/nn/adam.hpp"
#include "pn2n/nn/checkpoint.hpp"
#include "pn2n/nn_bridge.hpp"
#include "pn2n/rng.hpp"

namespace pn2n {

void DeblurTrainConfig::validate() const {
  if (lambda2 < 0.0) throw std::invalid_argument("DeblurTrainConfig: lambda2 must be >= 0");
  if (bias_lr <= 0.0 || net_lr <= 0.0) {
    throw std::invalid_argument("DeblurTrainConfig: learning rates must be > 0");
  }
  if (steps < 1) throw std::invalid_argument("DeblurTrainConfig: steps must be >= 1");
}

double deblur_loss(const Image& x_hat, const Image& y_prime, const Image& bias,
                   const Psf& psf, double lambda2, bool regularization) {
  require_same_size(x_hat, y_prime, "deblur_loss");
  require_same_size(x_hat, bias, "deblur_loss");
  const Image kx = convolve(x_hat, psf);
  const double n = static_cast<double>(kx.size());
  double data = 0.0, reg = 0.0;
  for (std::size_t i = 0; i < kx.size(); ++i) {
    const double r1 = kx.data()[i] - (y_prime.data()[i] - bias.data()[i]);
    data += r1 * r1;
    if (regularization) {
      const double r2 = kx.data()[i] - y_prime.data()[i];
      reg += r2 * r2;
    }
  }
  return (data + lambda2 * reg) / n;
}

void deblur_loss_grads(const Image& x_hat, const Image& y_prime, const Image& bias,
                       const Psf& psf, double lambda2, bool regularization,
                       Image& g_xhat, Image& g_bias) {
  const Image kx = convolve(x_hat, psf);
  const double n = static_cast<double>(kx.size());
  Image combined(kx.height(), kx.width(), 0.0);
  g_bias = Image(kx.height(), kx.width(), 0.0);
  for (std::size_t i = 0; i < kx.size(); ++i) {
    const double r1 = kx.data()[i] - y_prime.data()[i] + bias.data()[i];
    double s = 2.0 * r1;
    if (regularization) s += 2.0 * lambda2 * (kx.data()[i] - y_prime.data()[i]);
    combined.data()[i] = s / n;
    g_bias.data()[i] = 2.0 * r1 / n;
  }
  // adjoint of the circular convolution
  g_xhat = correlate(combined, psf);
}

namespace {

nn::UNetConfig deblur_net_config(const DeblurSpec& spec) {
  nn::UNetConfig cfg;
  cfg.in_channels = 1;
  cfg.out_channels = 1;
  cfg.widths = spec.widths;
  cfg.batch_norm = true;
  cfg.hidden = nn::Act::Softplus;
  cfg.first_block = nn::Act::ReLU;
  cfg.output = nn::Act::Sigmoid;
  return cfg;
}

}  // namespace

DeblurTrainResult train_deblur(const std::vector<Image>& y_primes, const Psf& psf,
                               const DeblurSpec& spec, const DeblurTrainConfig& cfg) {
  cfg.validate();
  if (y_primes.empty()) throw std::invalid_argument("train_deblur: no inputs");
  const int h = y_primes[0].height(), w = y_primes[0].width();
  for (const auto& y : y_primes) require_same_size(y, y_primes[0], "train_deblur");

  DeblurTrainResult result{
      DeblurCheckpoint{spec, nn::UNet<float>(deblur_net_config(spec), cfg.seed)},
      BiasField{Image(h, w, 0.0)},
      {},
      y_primes.size() == 1};

  nn::UNet<float>& net = result.checkpoint.net;
  const int div = net.depth_divisor();

  std::vector<Image> padded;
  std::vector<const Image*> batch_ptrs;
  for (const auto& y : y_primes) padded.push_back(pad_to_multiple(y, div));
  for (const auto& p : padded) batch_ptrs.push_back(&p);

  // bias lives in float for the optimizer; exported as an Image afterwards
  std::vector<float> bias_values(static_cast<std::size_t>(h) * w, 0.0f);
  std::vector<float> bias_grad(bias_values.size(), 0.0f);
  std::vector<nn::Param<float>> bias_param = {
      {"bias_field", &bias_values, &bias_grad, true}};

  nn::Adam<float> opt({{net.params(), cfg.net_lr}, {bias_param, cfg.bias_lr}});

  const int n_inputs = static_cast<int>(y_primes.size());
  Image bias_image(h, w, 0.0);

  for (int step = 0; step < cfg.steps; ++step) {
    // current bias as an image
    for (std::size_t i = 0; i < bias_values.size(); ++i) {
      bias_image.data()[i] = static_cast<double>(bias_values[i]);
    }
    const Image padded_bias = pad_to_multiple(bias_image, div);

    // batched forward on u_i = y'_i - b
    nn::Tensor<float> input = batch_to_tensor(batch_ptrs);
    for (int b = 0; b < input.n; ++b) {
      float* p = input.data() + input.offset(b, 0, 0, 0);
      for (int i = 0; i < input.h * input.w; ++i) {
        p[i] -= static_cast<float>(padded_bias.data()[i]);
      }
    }
    nn::Tensor<float> xhat = net.forward(input, true);

    net.zero_grad();
    std::fill(bias_grad.begin(), bias_grad.end(), 0.0f);

    double step_loss = 0.0;
    nn::Tensor<float> g_out(xhat.n, 1, xhat.h, xhat.w);
    for (int b = 0; b < n_inputs; ++b) {
      const Image xb = tensor_to_image(xhat, b, h, w);
      step_loss += deblur_loss(xb, y_primes[b], bias_image, psf, cfg.lambda2,
                               cfg.regularization_enabled);
      Image gx, gb;
      deblur_loss_grads(xb, y_primes[b], bias_image, psf, cfg.lambda2,
                        cfg.regularization_enabled, gx, gb);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          g_out.at(b, 0, y, x) = static_cast<float>(gx.at(y, x));
        }
      }
      if (!cfg.freeze_bias) {
        for (std::size_t i = 0; i < bias_grad.size(); ++i) {
          bias_grad[i] += static_cast<float>(gb.data()[i]);
        }
      }
    }

    if (!std::isfinite(step_loss)) {
      throw std::runtime_error("deblur training diverged: non-finite loss at step " +
                               std::to_string(step) + " (net lr " + std::to_string(cfg.net_lr) +
                               ", bias lr " + std::to_string(cfg.bias_lr) + ")");
    }
    result.loss_trace.push_back(step_loss);

    nn::Tensor<float> g_in = net.backward(g_out);
    if (!cfg.freeze_bias) {
      // the network input u = y' - b contributes -dL/du to the bias gradient
      for (int b = 0; b < n_inputs; ++b) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            bias_grad[static_cast<std::size_t>(y) * w + x] -= g_in.at(b, 0, y, x);
          }
        }
      }
    }
    opt.step();
    if (cfg.freeze_bias) std::fill(bias_values.begin(), bias_values.end(), 0.0f);
  }

  for (std::size_t i = 0; i < bias_values.size(); ++i) {
    result.bias.values.data()[i] = static_cast<double>(bias_values[i]);
  }
  return result;
}

Image reconstruct(const DeblurCheckpoint& checkpoint, const BiasField& bias,
                  const Image& y_prime) {
  require_same_size(y_prime, bias.values, "reconstruct");
  nn::UNet<float> net = checkpoint.net;
  Image u = y_prime - bias.values;
  const Image padded = pad_to_multiple(u, net.depth_divisor());
  nn::Tensor<float> t = batch_to_tensor({&padded});
  nn::Tensor<float> out = net.forward(t, false);
  return tensor_to_image(out, 0, y_prime.height(), y_prime.width());
}

void save_deblur(const DeblurTrainResult& result, const std::filesystem::path& path) {
  nn::CheckpointData data;
  data.meta = {{"kind", "bias-deblurnet"},
               {"widths", result.checkpoint.spec.widths},
               {"bias_height", result.bias.values.height()},
               {"bias_width", result.bias.values.width()}};
  nn::UNet<float> net = result.checkpoint.net;
  for (auto& p : net.params()) {
    data.tensors.emplace_back(p.name, std::vector<float>(p.value->begin(), p.value->end()));
  }
  std::vector<float> bias(result.bias.values.size());
  for (std::size_t i = 0; i < bias.size(); ++i) {
    bias[i] = static_cast<float>(result.bias.values.data()[i]);
  }
  data.tensors.emplace_back("bias_field", std::move(bias));
  nn::save_checkpoint_file(path, data);
}

DeblurTrainResult load_deblur(const std::filesystem::path& path) {
  nn::CheckpointData data = nn::load_checkpoint_file(path);
  if (data.meta.value("kind", "") != "bias-deblurnet") {
    throw std::runtime_error("not a bias-deblurnet checkpoint: " + path.string());
  }
  DeblurSpec spec;
  spec.widths = data.meta.at("widths").get<std::vector<int>>();
  const int bh = data.meta.at("bias_height").get<int>();
  const int bw = data.meta.at("bias_width").get<int>();

  DeblurTrainResult result{DeblurCheckpoint{spec, nn::UNet<float>(deblur_net_config(spec), 0)},
                           BiasField{Image(bh, bw, 0.0)},
                           {},
                           false};
  auto params = result.checkpoint.net.params();
  if (params.size() + 1 != data.tensors.size()) {
    throw std::runtime_error("incompatible deblur architecture in " + path.string());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name != data.tensors[i].first ||
        params[i].value->size() != data.tensors[i].second.size()) {
      throw std::runtime_error("incompatible deblur tensor " + data.tensors[i].first);
    }
    params[i].value->assign(data.tensors[i].second.begin(), data.tensors[i].second.end());
  }
  const auto& [bias_name, bias_blob] = data.tensors.back();
  if (bias_name != "bias_field" || bias_blob.size() != result.bias.values.size()) {
    throw std::runtime_error("missing bias_field tensor in " + path.string());
  }
  for (std::size_t i = 0; i < bias_blob.size(); ++i) {
    result.bias.values.data()[i] = static_cast<double>(bias_blob[i]);
  }
  return result;
}

PipelineResult run_pipeline(const std::vector<FrameSequence>& sequences, const Psf& psf,
                            Ablation ablation, const PipelineConfig& cfg) {
  if (sequences.empty()) throw std::invalid_argument("run_pipeline: no sequences");
  const int h = sequences[0].latent_blurred.height();
  const int w = sequences[0].latent_blurred.width();

  PipelineResult result;
  result.learned_bias.values = Image(h, w, 0.0);

  // stage 1: per-scene y'
  if (ablation == Ablation::T2) {
    // raw frame mean, no denoiser
    for (const auto& seq : sequences) {
      Image mean(h, w, 0.0);
      for (const auto& f : seq.frames) mean += f;
      mean *= 1.0 / static_cast<double>(seq.frames.size());
      result.y_primes.push_back(std::move(mean));
    }
  } else {
    FramePairSet pairs = make_pairs(sequences, cfg.pair_rule);
    DenoiserCheckpoint den = train_denoiser(pairs, cfg.denoiser_spec, cfg.sn2n);
    result.sn2n_trace = den.loss_trace;
    for (const auto& seq : sequences) {
      const int k = std::min<int>(cfg.denoise_frames, static_cast<int>(seq.frames.size()));
      Image acc(h, w, 0.0);
      for (int i = 0; i < k; ++i) acc += denoise(den, seq.frames[i]);
      acc *= 1.0 / k;
      result.y_primes.push_back(std::move(acc));
    }
  }

  if (ablation == Ablation::T1) {
    result.restored = result.y_primes;
    return result;
  }

  // stage 2: joint deblurring
  DeblurTrainConfig deblur_cfg = cfg.deblur;
  deblur_cfg.freeze_bias = (ablation == Ablation::T3) || deblur_cfg.freeze_bias;
  DeblurTrainResult trained = train_deblur(result.y_primes, psf, cfg.deblur_spec, deblur_cfg);
  result.deblur_trace = trained.loss_trace;
  result.learned_bias = trained.bias;
  for (const auto& y : result.y_primes) {
    result.restored.push_back(reconstruct(trained.checkpoint, trained.bias, y));
  }
  return result;
}

}  // namespace pn2n
