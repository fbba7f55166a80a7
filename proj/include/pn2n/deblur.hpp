#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/nn/unet.hpp"
#include "pn2n/noise.hpp"
#include "pn2n/psf.hpp"
#include "pn2n/sn2n.hpp"

namespace pn2n {

// Physics-guided deblurring U-Net: five encoding blocks, four decoding
// blocks, batch norm after each conv, Softplus activations (ReLU in the
// first encoder block), Sigmoid output. Widths configurable.
struct DeblurSpec {
  std::vector<int> widths = {48, 96, 192, 384, 768};
};

// One learnable real per pixel, shared across every frame/scene of a joint
// optimization; initialized to zeros.
struct BiasField {
  Image values;
};

struct DeblurTrainConfig {
  double lambda2 = 0.1;               // regularization weight
  bool regularization_enabled = true; // false drops the second loss term
  bool freeze_bias = false;           // keep the bias at zero (ablation T3)
  double bias_lr = 0.01;
  double net_lr = 0.0001;
  int steps = 5000;
  std::uint64_t seed = 0;

  void validate() const;
};

// ||PSF (*) x_hat - (y' - b)||^2 + lambda2 ||PSF (*) x_hat - y'||^2,
// mean-reduced over pixels; the second term is dropped when regularization
// is disabled.
double deblur_loss(const Image& x_hat, const Image& y_prime, const Image& bias,
                   const Psf& psf, double lambda2, bool regularization = true);

// Analytic gradients w.r.t. x_hat and the bias field.
void deblur_loss_grads(const Image& x_hat, const Image& y_prime, const Image& bias,
                       const Psf& psf, double lambda2, bool regularization,
                       Image& g_xhat, Image& g_bias);

struct DeblurCheckpoint {
  DeblurSpec spec;
  nn::UNet<float> net;
};

struct DeblurTrainResult {
  DeblurCheckpoint checkpoint;
  BiasField bias;
  std::vector<double> loss_trace;
  bool single_frame_warning = false;  // degenerate single-frame mode was used
};

// Joint descent on the network (net_lr) and the shared bias field (bias_lr)
// over the objective summed over all inputs. Deterministic given cfg.seed;
// throws on NaN loss with step diagnostics.
DeblurTrainResult train_deblur(const std::vector<Image>& y_primes, const Psf& psf,
                               const DeblurSpec& spec, const DeblurTrainConfig& cfg);

// x_hat = forward(y' - b) in eval mode; output strictly inside (0,1).
Image reconstruct(const DeblurCheckpoint& checkpoint, const BiasField& bias,
                  const Image& y_prime);

void save_deblur(const DeblurTrainResult& result, const std::filesystem::path& path);
DeblurTrainResult load_deblur(const std::filesystem::path& path);

// ---- pipeline ----------------------------------------------------------

enum class Ablation { T1, T2, T3, T4 };

struct PipelineConfig {
  DenoiserSpec denoiser_spec;
  Sn2nTrainConfig sn2n;
  DeblurSpec deblur_spec;
  DeblurTrainConfig deblur;
  PairRule pair_rule = PairRule::AdjacentPairs;
  int denoise_frames = 4;  // frames denoised and averaged into each scene's y'
};

struct PipelineResult {
  std::vector<Image> restored;  // one per scene
  std::vector<Image> y_primes;  // deblur-stage inputs per scene
  BiasField learned_bias;       // zeros when the stage is absent or frozen
  std::vector<double> sn2n_trace;
  std::vector<double> deblur_trace;
};

// T1: denoiser only (output is y'). T2: deblur net + bias on the raw frame
// mean, no denoiser. T3: denoiser + deblur net, bias frozen at zero.
// T4: the full pipeline.
PipelineResult run_pipeline(const std::vector<FrameSequence>& sequences, const Psf& psf,
                            Ablation ablation, const PipelineConfig& cfg);

}  // namespace pn2n
