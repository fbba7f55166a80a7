#include "pn2n/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "pn2n/rng.hpp"

namespace pn2n {

Image NoiseModel::bias_field() const {
  Image out = poisson_mean;
  out += gaussian_mean;
  out *= intensity_scale;
  return out;
}

void NoiseModel::validate() const {
  require_same_size(poisson_mean, gaussian_mean, "NoiseModel");
  if (poisson_mean.min_value() < 0.0) {
    throw std::invalid_argument("NoiseModel: poisson mean field must be non-negative");
  }
  if (intensity_scale <= 0.0) {
    throw std::invalid_argument("NoiseModel: intensity_scale must be positive");
  }
  if (law == VarianceLaw::UniformPerFrame && !(sigma2_lo < sigma2_hi)) {
    throw std::invalid_argument("NoiseModel: UniformPerFrame requires lo < hi");
  }
}

std::string condition_label(ConditionName name) {
  switch (name) {
    case ConditionName::C1: return "C1";
    case ConditionName::C2: return "C2";
    case ConditionName::C3: return "C3";
    case ConditionName::C4: return "C4";
    case ConditionName::Custom: return "custom";
  }
  return "?";
}

ConditionName condition_from_label(const std::string& label) {
  if (label == "C1" || label == "c1") return ConditionName::C1;
  if (label == "C2" || label == "c2") return ConditionName::C2;
  if (label == "C3" || label == "c3") return ConditionName::C3;
  if (label == "C4" || label == "c4") return ConditionName::C4;
  if (label == "custom") return ConditionName::Custom;
  throw std::invalid_argument("unknown noise condition: " + label);
}

namespace {

// mu = 0.001*(x/4)^2 + 0.02*y + 2  (quadratic-in-x field)
double quad_field(int x, int y) {
  const double q = x / 4.0;
  return 0.001 * q * q + 0.02 * y + 2.0;
}

// mu = 0.01*x + 0.01*y + 2  (linear field)
double lin_field(int x, int y) { return 0.01 * x + 0.01 * y + 2.0; }

}  // namespace

NoiseModel build_noise_fields(int width, int height, const NoiseCondition& condition) {
  if (width < kMinImageDim || height < kMinImageDim) {
    throw std::invalid_argument("build_noise_fields: grid too small");
  }
  NoiseModel m;
  m.poisson_mean = Image(height, width, 0.0);
  m.gaussian_mean = Image(height, width, 0.0);

  switch (condition.name) {
    case ConditionName::C1:
      m.law = VarianceLaw::FixedSigma;
      m.sigma2 = 100.0;
      break;
    case ConditionName::C2:
      m.law = VarianceLaw::FixedSigma;
      m.sigma2 = 0.0;
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) m.poisson_mean.at(y, x) = 15.0;
      break;
    case ConditionName::C3:
      m.law = VarianceLaw::UniformPerFrame;
      m.sigma2_lo = 20.0;
      m.sigma2_hi = 50.0;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          m.poisson_mean.at(y, x) = quad_field(x, y);
          m.gaussian_mean.at(y, x) = lin_field(x, y);
        }
      }
      break;
    case ConditionName::C4:
      // C3 with the mu_p / mu_n roles swapped
      m.law = VarianceLaw::UniformPerFrame;
      m.sigma2_lo = 20.0;
      m.sigma2_hi = 50.0;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          m.poisson_mean.at(y, x) = lin_field(x, y);
          m.gaussian_mean.at(y, x) = quad_field(x, y);
        }
      }
      break;
    case ConditionName::Custom:
      // custom = scaled C3 fields; callers needing full control build the
      // NoiseModel directly
      m.law = VarianceLaw::UniformPerFrame;
      m.sigma2_lo = 20.0;
      m.sigma2_hi = 50.0;
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          m.poisson_mean.at(y, x) = quad_field(x, y);
          m.gaussian_mean.at(y, x) = lin_field(x, y);
        }
      }
      break;
  }
  if (condition.bias_scale != 1.0) {
    m.poisson_mean *= condition.bias_scale;
    m.gaussian_mean *= condition.bias_scale;
  }
  m.validate();
  return m;
}

Image degrade(const Image& latent, const Psf& psf, const NoiseModel& model, std::uint64_t seed) {
  model.validate();
  require_same_size(latent, model.poisson_mean, "degrade");
  Image out = convolve(latent, psf);
  Rng rng(seed);

  double sigma2 = model.sigma2;
  if (model.law == VarianceLaw::UniformPerFrame) {
    sigma2 = rng.uniform(model.sigma2_lo, model.sigma2_hi);
  }
  const double sigma = std::sqrt(std::max(0.0, sigma2));
  const double s = model.intensity_scale;

  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      double n = 0.0;
      const double mu_p = model.poisson_mean.at(y, x);
      if (mu_p > 0.0) n += static_cast<double>(rng.poisson(mu_p));
      n += rng.normal(model.gaussian_mean.at(y, x), sigma);
      out.at(y, x) += s * n;
    }
  }
  out.set_clamped(false);
  return out;
}

FrameSequence generate_sequence(const Image& latent, const Psf& psf,
                                const NoiseCondition& condition, int n_frames,
                                std::uint64_t seed) {
  if (n_frames < 2 || n_frames % 2 != 0) {
    throw std::invalid_argument("generate_sequence: frame count must be even and >= 2");
  }
  const NoiseModel model = build_noise_fields(latent.width(), latent.height(), condition);

  FrameSequence seq;
  seq.latent_blurred = convolve(latent, psf);
  seq.true_bias_field = model.bias_field();
  seq.frames.reserve(n_frames);
  seq.seeds.reserve(n_frames);
  for (int f = 0; f < n_frames; ++f) {
    const std::uint64_t frame_seed = derive_seed(seed, static_cast<std::uint64_t>(f));
    seq.seeds.push_back(frame_seed);
    seq.frames.push_back(degrade(latent, psf, model, frame_seed));
  }
  return seq;
}

}  // namespace pn2n
