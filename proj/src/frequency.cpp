#include "pn2n/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "pn2n/fft.hpp"

namespace pn2n {

namespace {

// Spectrum rebound threshold: a sub-tolerance magnitude is an interior zero
// only if some larger radius still carries at least this fraction of DC.
constexpr double kReboundThreshold = 0.05;

// Outermost radial band for the decay test, in cycles/pixel.
constexpr double kOuterBandRadius = 0.45;

double freq_radius(int i, int j, int h, int w) {
  const double fy = (i <= h / 2 ? i : i - h) / static_cast<double>(h);
  const double fx = (j <= w / 2 ? j : j - w) / static_cast<double>(w);
  return std::hypot(fy, fx);
}

}  // namespace

OtfClassification classify_psf(const Psf& psf, double zero_tol) {
  if (zero_tol <= 0.0 || zero_tol >= 1.0) {
    throw std::invalid_argument("classify_psf: zero_tol must be in (0, 1)");
  }
  const int h = psf.otf_height(), w = psf.otf_width();
  const auto& otf = psf.otf();
  const double dc = std::abs(otf[0]);

  // ring statistics at integer radius resolution of the finer axis
  const int rings = static_cast<int>(std::ceil(0.5 * std::sqrt(2.0) * std::min(h, w))) + 1;
  std::vector<double> ring_sum(rings, 0.0), ring_max(rings, 0.0);
  std::vector<int> ring_count(rings, 0);
  const double ring_scale = static_cast<double>(std::min(h, w));

  std::vector<double> mag(static_cast<std::size_t>(h) * w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * w + j;
      mag[idx] = std::abs(otf[idx]) / dc;
      const int ring = static_cast<int>(std::lround(freq_radius(i, j, h, w) * ring_scale));
      ring_sum[ring] += mag[idx];
      ring_max[ring] = std::max(ring_max[ring], mag[idx]);
      ring_count[ring] += 1;
    }
  }

  OtfClassification out;
  for (int r = 0; r < rings; ++r) {
    if (ring_count[r] == 0) continue;
    out.decay_profile.emplace_back(r / ring_scale, ring_sum[r] / ring_count[r]);
  }

  // tail start: smallest ring from which the per-ring max never rebounds
  int tail_ring = rings;
  for (int r = rings - 1; r >= 0; --r) {
    if (ring_count[r] > 0 && ring_max[r] >= kReboundThreshold) break;
    tail_ring = r;
  }

  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * w + j;
      if (mag[idx] >= zero_tol) continue;
      const int ring = static_cast<int>(std::lround(freq_radius(i, j, h, w) * ring_scale));
      if (ring < tail_ring) out.zero_frequencies.emplace_back(i, j);
    }
  }

  if (!out.zero_frequencies.empty()) {
    out.condition = OtfCondition::HasZero;
    return out;
  }

  double outer_sum = 0.0;
  int outer_count = 0;
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      if (freq_radius(i, j, h, w) < kOuterBandRadius) continue;
      outer_sum += mag[static_cast<std::size_t>(i) * w + j];
      outer_count += 1;
    }
  }
  const double outer_mean = outer_count > 0 ? outer_sum / outer_count : 1.0;
  out.condition = outer_mean < 0.1 ? OtfCondition::DecayingNoZero : OtfCondition::NeitherApplies;
  return out;
}

ResidualFloor residual_floor(const Image& observation, const Psf& psf, double zero_tol) {
  const int h = observation.height(), w = observation.width();
  if (psf.otf_height() != h || psf.otf_width() != w) {
    throw std::invalid_argument("residual_floor: observation and cached OTF sizes differ");
  }
  const auto& otf = psf.otf();
  const double dc = std::abs(otf[0]);
  const auto spectrum = fft::dft2(observation);
  const double n = static_cast<double>(observation.size());

  ResidualFloor out;
  out.infeasible_energy_map = Image(h, w, 0.0);
  for (std::size_t idx = 0; idx < spectrum.size(); ++idx) {
    if (std::abs(otf[idx]) / dc >= zero_tol) continue;
    const double e = std::norm(spectrum[idx]) / n;
    out.infeasible_energy_map.data()[idx] = e;
    out.floor_value += e;
  }
  return out;
}

StagnationResult stagnation_experiment(const Image& latent, const Psf& psf,
                                       const Image& bias_field, int steps) {
  require_same_size(latent, bias_field, "stagnation_experiment");
  if (steps < 1) throw std::invalid_argument("stagnation_experiment: steps must be >= 1");

  const Image y_prime = convolve(latent, psf) + bias_field;
  const int h = latent.height(), w = latent.width();
  const double otf_max = psf.max_otf_magnitude();
  const double step_x = 1.0 / (otf_max * otf_max);
  const double step_b = 0.5;

  auto sum_sq = [](const Image& r) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) s += r.data()[i] * r.data()[i];
    return s;
  };

  StagnationResult out;

  // biased: x <- x - step * K^T (K x - y')
  {
    Image x(h, w, 0.0);
    Image residual = convolve(x, psf) - y_prime;
    out.biased.loss.push_back(sum_sq(residual));
    for (int t = 0; t < steps; ++t) {
      Image grad = correlate(residual, psf);
      grad *= step_x;
      x -= grad;
      residual = convolve(x, psf) - y_prime;
      out.biased.loss.push_back(sum_sq(residual));
    }
  }

  // corrected: joint descent; residual r = K x + b - y'
  {
    Image x(h, w, 0.0), b(h, w, 0.0);
    Image residual = convolve(x, psf) + b - y_prime;
    out.corrected.loss.push_back(sum_sq(residual));
    for (int t = 0; t < steps; ++t) {
      Image grad_x = correlate(residual, psf);
      grad_x *= step_x;
      Image grad_b = residual;
      grad_b *= step_b;
      x -= grad_x;
      b -= grad_b;
      residual = convolve(x, psf) + b - y_prime;
      out.corrected.loss.push_back(sum_sq(residual));
    }
  }

  auto check = [](DescentCurve& c) {
    for (double v : c.loss) {
      if (!std::isfinite(v)) { c.converged = false; return; }
    }
    if (c.loss.back() > c.loss.front() * (1.0 + 1e-12) + 1e-12) c.converged = false;
  };
  check(out.biased);
  check(out.corrected);
  return out;
}

}  // namespace pn2n
