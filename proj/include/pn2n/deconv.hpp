#pragma once

#include "pn2n/image.hpp"
#include "pn2n/psf.hpp"

namespace pn2n {

struct DeconvParams {
  double wiener_k = 0.01;  // noise-to-signal ratio
  int rl_iterations = 20;
  int nlr_iterations = 25;
  double nlr_alpha = 1.2;  // correction-factor exponent
  double nlr_beta = 1.0;   // amplitude-weighting exponent

  void validate() const;
};

struct DeconvResult {
  Image image;
  // wiener: unstable division near an OTF zero at k=0;
  // rl: negative observation pixels were clipped;
  // nlr: divergence triggered an early stop
  bool flagged = false;
};

// Fourier-domain estimate conj(OTF) * Y / (|OTF|^2 + k).
DeconvResult wiener_deconvolve(const Image& observation, const Psf& psf, double k);

// Multiplicative update x <- x * (psf^T (*) (y / (psf (*) x))), initialized
// from a constant image at the observation mean.
DeconvResult richardson_lucy(const Image& observation, const Psf& psf, int iterations);

// Richardson-Lucy framework with two nonlinear amplitude weights: the
// data/model ratio is raised to beta before backprojection and the resulting
// correction factor to alpha, with total flux renormalized each step.
// alpha = beta = 1 reduces to plain RL; the observation stays a fixed point
// under a delta PSF for any exponents.
DeconvResult nlr_deconvolve(const Image& observation, const Psf& psf, int iterations,
                            double alpha, double beta);

}  // namespace pn2n
