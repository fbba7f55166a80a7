#include "pn2n/psf_models.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pn2n/rng.hpp"

namespace pn2n {

namespace {

constexpr int kSupersample = 8;

// Fraction of each pixel covered by {r_in <= d <= r_out}, supersampled.
std::vector<double> ring_kernel(double r_in, double r_out, int& k_out) {
  const int k = 2 * static_cast<int>(std::ceil(r_out)) + 1;
  std::vector<double> kernel(static_cast<std::size_t>(k) * k, 0.0);
  const double c = (k * kSupersample - 1) / 2.0;
  for (int i = 0; i < k * kSupersample; ++i) {
    for (int j = 0; j < k * kSupersample; ++j) {
      const double d = std::hypot(i - c, j - c) / kSupersample;
      if (d >= r_in && d <= r_out) {
        kernel[static_cast<std::size_t>(i / kSupersample) * k + j / kSupersample] += 1.0;
      }
    }
  }
  k_out = k;
  return kernel;
}

}  // namespace

Psf make_psf(const PsfShape& shape, int grid_size) {
  switch (shape.kind) {
    case PsfShape::Kind::Disk: {
      if (shape.radius < 0.0) throw std::invalid_argument("make_psf: disk radius must be >= 0");
      if (shape.radius < 0.5 / kSupersample) return Psf::delta(grid_size, grid_size);
      int k = 0;
      auto kernel = ring_kernel(0.0, shape.radius, k);
      return Psf::make(k, k, std::move(kernel), grid_size, grid_size);
    }
    case PsfShape::Kind::Gaussian: {
      if (shape.sigma <= 0.0) return Psf::delta(grid_size, grid_size);
      const int half = static_cast<int>(std::ceil(4.0 * shape.sigma));
      const int k = 2 * half + 1;
      std::vector<double> kernel(static_cast<std::size_t>(k) * k);
      const double inv = 1.0 / (2.0 * shape.sigma * shape.sigma);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
          const double dy = i - half, dx = j - half;
          kernel[static_cast<std::size_t>(i) * k + j] = std::exp(-(dy * dy + dx * dx) * inv);
        }
      }
      return Psf::make(k, k, std::move(kernel), grid_size, grid_size);
    }
    case PsfShape::Kind::Annulus: {
      if (!(0.0 <= shape.r_in && shape.r_in < shape.r_out)) {
        throw std::invalid_argument("make_psf: annulus requires 0 <= r_in < r_out");
      }
      int k = 0;
      auto kernel = ring_kernel(shape.r_in, shape.r_out, k);
      return Psf::make(k, k, std::move(kernel), grid_size, grid_size);
    }
  }
  throw std::logic_error("make_psf: unreachable");
}

Psf perturb_psf(const Psf& psf, PerturbMode mode, double amount, std::uint64_t seed) {
  const int kh = psf.kernel_height(), kw = psf.kernel_width();
  if (mode == PerturbMode::Blur) {
    if (amount <= 0.0) return psf;
    const int half = std::max(1, static_cast<int>(std::ceil(3.0 * amount)));
    const int g = 2 * half + 1;
    std::vector<double> gauss(static_cast<std::size_t>(g) * g);
    const double inv = 1.0 / (2.0 * amount * amount);
    double gsum = 0.0;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const double dy = i - half, dx = j - half;
        gauss[static_cast<std::size_t>(i) * g + j] = std::exp(-(dy * dy + dx * dx) * inv);
        gsum += gauss[static_cast<std::size_t>(i) * g + j];
      }
    }
    for (double& v : gauss) v /= gsum;

    // full convolution; support grows so no mass is lost
    const int oh = kh + g - 1, ow = kw + g - 1;
    std::vector<double> out(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int i = 0; i < kh; ++i) {
      for (int j = 0; j < kw; ++j) {
        const double kv = psf.kernel_at(i, j);
        if (kv == 0.0) continue;
        for (int u = 0; u < g; ++u) {
          for (int v = 0; v < g; ++v) {
            out[static_cast<std::size_t>(i + u) * ow + (j + v)] +=
                kv * gauss[static_cast<std::size_t>(u) * g + v];
          }
        }
      }
    }
    return Psf::make(oh, ow, std::move(out), psf.otf_height(), psf.otf_width());
  }

  // Noise mode
  if (amount <= 0.0) return psf;
  double peak = 0.0;
  for (double v : psf.kernel()) peak = std::max(peak, v);
  const double stddev = amount / 100.0 * peak;
  Rng rng(seed);
  std::vector<double> out(psf.kernel());
  double sum = 0.0;
  for (double& v : out) {
    v = std::max(0.0, v + rng.normal(0.0, stddev));
    sum += v;
  }
  if (sum <= 0.0) {
    throw std::runtime_error("perturb_psf: kernel vanished after noise clipping");
  }
  return Psf::make(kh, kw, std::move(out), psf.otf_height(), psf.otf_width());
}

PsfShape benchmark_psf_shape(int index) {
  switch (index) {
    case 1: return PsfShape::gaussian(1.2);
    case 2: return PsfShape::disk(2.0);
    case 3: return PsfShape::disk(3.0);
    case 4: return PsfShape::disk(5.0);
    case 5: return PsfShape::annulus(3.5, 5.5);
    default: throw std::invalid_argument("benchmark_psf: index must be 1..5");
  }
}

Psf benchmark_psf(int index, int grid_size) {
  return make_psf(benchmark_psf_shape(index), grid_size);
}

std::string psf_shape_label(const PsfShape& shape) {
  char buf[64];
  switch (shape.kind) {
    case PsfShape::Kind::Disk:
      std::snprintf(buf, sizeof buf, "disk(%.3g)", shape.radius);
      break;
    case PsfShape::Kind::Gaussian:
      std::snprintf(buf, sizeof buf, "gaussian(%.3g)", shape.sigma);
      break;
    case PsfShape::Kind::Annulus:
      std::snprintf(buf, sizeof buf, "annulus(%.3g,%.3g)", shape.r_in, shape.r_out);
      break;
  }
  return buf;
}

}  // namespace pn2n
