#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/psf.hpp"

namespace pn2n {

enum class VarianceLaw { FixedSigma, UniformPerFrame };

// Spatially varying Poisson+Gaussian specification. Mean fields are in count
// units (8-bit scale); intensity_scale bridges counts to [0,1] intensities.
struct NoiseModel {
  Image poisson_mean;   // mu_p >= 0, counts
  Image gaussian_mean;  // mu_n, counts
  VarianceLaw law = VarianceLaw::FixedSigma;
  double sigma2 = 0.0;                      // FixedSigma: Gaussian variance (counts^2)
  double sigma2_lo = 0.0, sigma2_hi = 0.0;  // UniformPerFrame: variance range
  double intensity_scale = 1.0 / 255.0;

  // intensity_scale * (mu_p + mu_n)
  Image bias_field() const;
  void validate() const;
};

enum class ConditionName { C1, C2, C3, C4, Custom };

// Named noise condition. bias_scale multiplies both mean fields (used for
// custom-bias experiments); 1.0 reproduces the standard conditions.
struct NoiseCondition {
  ConditionName name = ConditionName::C3;
  double bias_scale = 1.0;
};

std::string condition_label(ConditionName name);
ConditionName condition_from_label(const std::string& label);

// Evaluates the standard condition's mean-field polynomials at every pixel
// (x = column index, y = row index, 0-based).
NoiseModel build_noise_fields(int width, int height, const NoiseCondition& condition);

// Ordered multi-frame noisy observations of one latent blurred image,
// sharing one bias field.
struct FrameSequence {
  std::vector<Image> frames;
  Image latent_blurred;   // PSF (*) x, hidden ground truth for evaluation
  Image true_bias_field;  // intensity units
  std::vector<std::uint64_t> seeds;  // per-frame streams
};

// y = PSF (*) latent + intensity_scale * (P(mu_p) + N(mu_n, sigma^2)).
// sigma^2 is drawn once per call under UniformPerFrame. Deterministic given
// the seed. The output is not clipped to [0,1].
Image degrade(const Image& latent, const Psf& psf, const NoiseModel& model, std::uint64_t seed);

// n_frames must be even and >= 2. All frames share one (mu_p, mu_n) field;
// each frame gets an independent sigma^2 draw and noise samples from its own
// stream derived from (seed, frame index).
FrameSequence generate_sequence(const Image& latent, const Psf& psf,
                                const NoiseCondition& condition, int n_frames,
                                std::uint64_t seed);

}  // namespace pn2n
