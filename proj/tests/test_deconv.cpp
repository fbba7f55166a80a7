#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracle_utils.hpp"
#include "pn2n/deconv.hpp"
#include "pn2n/fft.hpp"
#include "pn2n/metrics.hpp"
#include "pn2n/noise.hpp"
#include "pn2n/psf_models.hpp"
#include "pn2n/rng.hpp"

using namespace pn2n;

namespace {
Image smooth_latent(int size, std::uint64_t seed) {
  Rng rng(seed);
  Image noise = oracle::random_image(size, size, rng);
  Image blurred = convolve(noise, make_psf(PsfShape::gaussian(2.0), size));
  const double lo = blurred.min_value(), hi = blurred.max_value();
  for (std::size_t i = 0; i < blurred.size(); ++i) {
    blurred.data()[i] = 0.05 + 0.9 * (blurred.data()[i] - lo) / (hi - lo);
  }
  return blurred;
}
}  // namespace

TEST_CASE("wiener: k=0 on a zero-free OTF is the exact inverse filter") {
  Image latent = smooth_latent(64, 1);
  Psf g = make_psf(PsfShape::gaussian(1.0), 64);
  Image obs = convolve(latent, g);
  auto res = wiener_deconvolve(obs, g, 0.0);
  CHECK(psnr(latent, res.image) >= 80.0);
}

TEST_CASE("wiener: delta psf with k=0 returns the observation") {
  Image latent = smooth_latent(32, 2);
  Psf delta = Psf::delta(32, 32);
  auto res = wiener_deconvolve(latent, delta, 0.0);
  CHECK(oracle::max_abs_diff(res.image, latent) < 1e-10);
  CHECK_FALSE(res.flagged);
}

TEST_CASE("wiener: k=0 with OTF zeros flags instability") {
  Image latent = smooth_latent(64, 3);
  Psf disk = make_psf(PsfShape::disk(5.0), 64);
  Image obs = convolve(latent, disk);
  auto res = wiener_deconvolve(obs, disk, 0.0);
  CHECK(res.flagged);
  CHECK(res.image.all_finite());
}

TEST_CASE("wiener: tuned k beats the blurred observation on a noisy instance") {
  Image latent = smooth_latent(64, 4);
  Psf disk = make_psf(PsfShape::disk(3.0), 64);
  NoiseModel c1 = build_noise_fields(64, 64, {ConditionName::C1});
  Image obs = degrade(latent, disk, c1, 55);

  const double base = psnr(latent, obs.clamped_copy());
  double best = -1.0;
  for (double k = 1e-5; k <= 1.0; k *= 3.0) {
    auto res = wiener_deconvolve(obs, disk, k);
    best = std::max(best, psnr(latent, res.image.clamped_copy()));
  }
  CHECK(best > base);
}

TEST_CASE("wiener k-limits") {
  Image latent = smooth_latent(32, 5);
  Psf g = make_psf(PsfShape::gaussian(1.0), 32);
  Image obs = convolve(latent, g);

  // k -> 0 tends to the direct inverse filter
  auto small = wiener_deconvolve(obs, g, 1e-8);
  auto spec = fft::dft2(obs);
  const auto& otf = g.otf();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] /= otf[i];
  Image direct = fft::idft2_real(spec, 32, 32);
  double rel = 0.0;
  for (std::size_t i = 0; i < direct.size(); ++i) {
    rel = std::max(rel, std::abs(direct.data()[i] - small.image.data()[i]) /
                            (std::abs(direct.data()[i]) + 1e-9));
  }
  CHECK(rel < 1e-4);

  // k -> inf shrinks the estimate toward zero
  auto huge = wiener_deconvolve(obs, g, 1e9);
  CHECK(huge.image.max_value() < 1e-6);
}

TEST_CASE("richardson-lucy: delta psf is a fixed point") {
  Image obs = smooth_latent(32, 6);
  Psf delta = Psf::delta(32, 32);
  for (int iters : {1, 5, 20}) {
    auto res = richardson_lucy(obs, delta, iters);
    CHECK(oracle::max_abs_diff(res.image, obs) < 1e-9);
  }
}

TEST_CASE("richardson-lucy: constant observation stays constant") {
  Image obs(32, 32, 0.42);
  Psf disk = make_psf(PsfShape::disk(3.0), 32);
  auto res = richardson_lucy(obs, disk, 10);
  for (std::size_t i = 0; i < res.image.size(); ++i) {
    CHECK(res.image.data()[i] == doctest::Approx(0.42).epsilon(1e-8));
  }
}

TEST_CASE("richardson-lucy improves fidelity on a noise-free blurred image") {
  Image latent = smooth_latent(64, 7);
  Psf disk = make_psf(PsfShape::disk(3.0), 64);
  Image obs = convolve(latent, disk);
  auto res = richardson_lucy(obs, disk, 20);
  CHECK(psnr(latent, res.image) > psnr(latent, obs));
}

TEST_CASE("richardson-lucy: flux conservation and non-negativity") {
  Image latent = smooth_latent(48, 8);
  Psf disk = make_psf(PsfShape::disk(2.5), 48);
  NoiseModel c1 = build_noise_fields(48, 48, {ConditionName::C1});
  Image obs = degrade(latent, disk, c1, 66);

  double flux_obs = 0.0;
  Image clipped = obs;
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    clipped.data()[i] = std::max(clipped.data()[i], 1e-8);
    flux_obs += clipped.data()[i];
  }
  for (int iters : {1, 5, 20}) {
    auto res = richardson_lucy(obs, disk, iters);
    CHECK(res.image.min_value() >= 0.0);
    double flux = 0.0;
    for (std::size_t i = 0; i < res.image.size(); ++i) flux += res.image.data()[i];
    CHECK(flux == doctest::Approx(flux_obs).epsilon(1e-4));
  }
}

TEST_CASE("richardson-lucy flags negative inputs and rejects zero images") {
  Image obs(32, 32, 0.0);
  Psf delta = Psf::delta(32, 32);
  CHECK_THROWS(richardson_lucy(obs, delta, 5));

  Image neg(32, 32, 0.5);
  neg.at(3, 3) = -0.2;
  auto res = richardson_lucy(neg, delta, 2);
  CHECK(res.flagged);
}

TEST_CASE("nlr with alpha=beta=1 reduces to richardson-lucy") {
  Image latent = smooth_latent(48, 9);
  Psf disk = make_psf(PsfShape::disk(2.5), 48);
  Image obs = convolve(latent, disk);
  auto rl = richardson_lucy(obs, disk, 15);
  auto nlr = nlr_deconvolve(obs, disk, 15, 1.0, 1.0);
  CHECK(oracle::max_abs_diff(rl.image, nlr.image) < 1e-8);
}

TEST_CASE("nlr: observation is the delta-psf fixed point for any exponents") {
  Image obs = smooth_latent(32, 10);
  Psf delta = Psf::delta(32, 32);
  // iterate long enough for the contraction toward the fixed point to settle
  for (auto [alpha, beta] : {std::pair{1.3, 1.1}, std::pair{0.7, 1.0}, std::pair{1.0, 1.4}}) {
    auto res = nlr_deconvolve(obs, delta, 40, alpha, beta);
    CHECK(oracle::max_abs_diff(res.image, obs) < 1e-8);
  }
}

TEST_CASE("nlr grid search lands between the classical baselines") {
  Image latent = smooth_latent(64, 11);
  Psf disk = make_psf(PsfShape::disk(3.0), 64);
  NoiseModel c1 = build_noise_fields(64, 64, {ConditionName::C1});
  Image obs = degrade(latent, disk, c1, 77);

  auto rl = richardson_lucy(obs, disk, 20);
  const double rl_psnr = psnr(latent, rl.image.clamped_copy());

  double wd_best = -1.0;
  for (double k = 1e-5; k <= 1.0; k *= 3.0) {
    wd_best = std::max(wd_best, psnr(latent, wiener_deconvolve(obs, disk, k).image.clamped_copy()));
  }

  double nlr_best = -1.0;
  for (double alpha : {0.8, 1.0, 1.2, 1.5}) {
    for (double beta : {0.9, 1.0, 1.1}) {
      auto res = nlr_deconvolve(obs, disk, 25, alpha, beta);
      nlr_best = std::max(nlr_best, psnr(latent, res.image.clamped_copy()));
    }
  }
  // qualitative ordering: tuned NLR is at least as good as plain RL and does
  // not beat the tuned Wiener filter on this Gaussian-noise instance
  CHECK(nlr_best >= rl_psnr - 0.05);
  CHECK(nlr_best <= wd_best + 1.0);
}

TEST_CASE("deconv params validation") {
  DeconvParams p;
  CHECK_NOTHROW(p.validate());
  p.wiener_k = -1.0;
  CHECK_THROWS(p.validate());
  p.wiener_k = 0.0;
  p.rl_iterations = 0;
  CHECK_THROWS(p.validate());
}
