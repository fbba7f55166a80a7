#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/nn/unet.hpp"
#include "pn2n/noise.hpp"

namespace pn2n {

// U-Net denoiser: six encoding blocks, five decoding blocks, 3x3 stride-1
// pad-1 convolutions, 2x2 max-pool downsampling, transposed-conv upsampling,
// ReLU hidden activations, LeakyReLU(0.1) output, Kaiming-normal init with
// zero biases, symmetric skips. Channel widths are configurable; the default
// doubles per level.
struct DenoiserSpec {
  std::vector<int> widths = {32, 64, 128, 256, 512, 512};
};

struct Sn2nTrainConfig {
  double lambda1 = 1.0;  // consistency weight
  int steps = 2000;
  int batch = 1;
  double learning_rate = 1e-4;  // Adam, beta1=0.9, beta2=0.999
  std::uint64_t seed = 0;

  void validate() const;
};

enum class PairRule { AdjacentPairs, OddEvenHalfAverages };

// Paired training samples built from a frame sequence; members of a pair are
// noise-independent observations of the same latent scene.
struct FramePairSet {
  std::vector<std::pair<Image, Image>> pairs;
  std::string provenance;
};

FramePairSet make_pairs(const FrameSequence& seq, PairRule rule);
FramePairSet make_pairs(const std::vector<FrameSequence>& seqs, PairRule rule);

// ||f1 - y2||^2 + ||f2 - y1||^2 + lambda1 ||f1 - f2||^2, each mean-reduced
// over pixels.
double sn2n_loss(const Image& f1, const Image& f2, const Image& y1, const Image& y2,
                 double lambda1);

// Analytic gradients of sn2n_loss w.r.t. the two predictions.
void sn2n_loss_grads(const Image& f1, const Image& f2, const Image& y1, const Image& y2,
                     double lambda1, Image& g1, Image& g2);

struct DenoiserCheckpoint {
  DenoiserSpec spec;
  nn::UNet<float> net;
  std::vector<double> loss_trace;  // per-step training loss
};

// Trains on the pair set; deterministic given cfg.seed. Throws on NaN loss
// with the step index and learning rate in the message.
DenoiserCheckpoint train_denoiser(const FramePairSet& pairs, const DenoiserSpec& spec,
                                  const Sn2nTrainConfig& cfg);

// Continues optimization from pretrained weights on a small pair set.
DenoiserCheckpoint pretrain_finetune(const DenoiserCheckpoint& pretrained,
                                     const FramePairSet& small_pairs,
                                     const Sn2nTrainConfig& cfg);

// Single forward pass (pad-and-crop applied); output dims equal input dims.
Image denoise(const DenoiserCheckpoint& checkpoint, const Image& y);

void save_denoiser(const DenoiserCheckpoint& checkpoint, const std::filesystem::path& path);
DenoiserCheckpoint load_denoiser(const std::filesystem::path& path);

}  // namespace pn2n
