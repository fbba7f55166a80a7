#include "pn2n/deconv.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "pn2n/fft.hpp"

namespace pn2n {

namespace {
constexpr double kDivisionGuard = 1e-12;
constexpr double kUnstableDenominator = 1e-6;
constexpr double kRlEpsilon = 1e-8;

double sum_of(const Image& img) {
  double s = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) s += img.data()[i];
  return s;
}

double data_loss(const Image& estimate, const Psf& psf, const Image& observation) {
  Image r = convolve(estimate, psf) - observation;
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.data()[i] * r.data()[i];
  return s;
}
}  // namespace

void DeconvParams::validate() const {
  if (wiener_k < 0.0) throw std::invalid_argument("DeconvParams: wiener_k must be >= 0");
  if (rl_iterations < 1 || nlr_iterations < 1) {
    throw std::invalid_argument("DeconvParams: iteration counts must be >= 1");
  }
}

DeconvResult wiener_deconvolve(const Image& observation, const Psf& psf, double k) {
  if (k < 0.0) throw std::invalid_argument("wiener_deconvolve: k must be >= 0");
  const int h = observation.height(), w = observation.width();
  const auto otf = psf.otf_for(h, w);
  auto spectrum = fft::dft2(observation);

  bool unstable = false;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    double denom = std::norm(otf[i]) + k;
    // amplification beyond 1e6 means an effective OTF zero met too small a k
    if (denom < kUnstableDenominator) unstable = true;
    spectrum[i] *= std::conj(otf[i]) / std::max(denom, kDivisionGuard);
  }
  DeconvResult out;
  out.image = fft::idft2_real(spectrum, h, w);
  out.flagged = unstable;
  return out;
}

DeconvResult richardson_lucy(const Image& observation, const Psf& psf, int iterations) {
  if (iterations < 1) throw std::invalid_argument("richardson_lucy: iterations must be >= 1");

  DeconvResult out;
  Image y = observation;
  bool clipped = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.data()[i] < 0.0) {
      y.data()[i] = kRlEpsilon;
      clipped = true;
    }
  }
  const double flux = sum_of(y);
  if (flux <= 0.0) throw std::invalid_argument("richardson_lucy: observation is all zero");

  Image x(y.height(), y.width(), y.mean());
  for (int it = 0; it < iterations; ++it) {
    Image denom = convolve(x, psf);
    Image ratio = y;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      ratio.data()[i] /= std::max(denom.data()[i], kDivisionGuard);
    }
    Image corr = correlate(ratio, psf);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x.data()[i] = std::max(0.0, x.data()[i] * corr.data()[i]);
    }
  }
  out.image = std::move(x);
  out.flagged = clipped;
  return out;
}

DeconvResult nlr_deconvolve(const Image& observation, const Psf& psf, int iterations,
                            double alpha, double beta) {
  if (iterations < 1) throw std::invalid_argument("nlr_deconvolve: iterations must be >= 1");

  Image y = observation;
  bool flagged = false;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y.data()[i] < 0.0) {
      y.data()[i] = kRlEpsilon;
      flagged = true;
    }
  }
  const double flux = sum_of(y);
  if (flux <= 0.0) throw std::invalid_argument("nlr_deconvolve: observation is all zero");

  Image x(y.height(), y.width(), y.mean());
  double prev_loss = data_loss(x, psf, y);
  int rising = 0;
  for (int it = 0; it < iterations; ++it) {
    Image denom = convolve(x, psf);
    Image ratio = y;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
      // beta: amplitude weighting of the data/model ratio before backprojection
      const double r = ratio.data()[i] / std::max(denom.data()[i], kDivisionGuard);
      ratio.data()[i] = std::pow(std::max(r, 0.0), beta);
    }
    Image corr = correlate(ratio, psf);
    for (std::size_t i = 0; i < x.size(); ++i) {
      // alpha: exponent on the backprojected correction factor
      const double c = std::pow(std::max(corr.data()[i], 0.0), alpha);
      x.data()[i] = std::max(0.0, x.data()[i] * c);
    }
    const double s = sum_of(x);
    if (s <= 0.0) throw std::runtime_error("nlr_deconvolve: estimate collapsed to zero");
    const double scale = flux / s;
    for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] *= scale;

    const double loss = data_loss(x, psf, y);
    rising = loss > prev_loss ? rising + 1 : 0;
    prev_loss = loss;
    if (rising >= 5) {
      flagged = true;
      break;
    }
  }
  DeconvResult out;
  out.image = std::move(x);
  out.flagged = flagged;
  return out;
}

}  // namespace pn2n
