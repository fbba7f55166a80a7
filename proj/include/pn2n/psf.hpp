#pragma once

#include <complex>
#include <vector>

#include "pn2n/image.hpp"

namespace pn2n {

// Normalized non-negative convolution kernel plus its optical transfer
// function (full DFT of the zero-padded, center-shifted kernel) cached at a
// target grid size. Immutable after construction.
class Psf {
 public:
  // Normalizes the kernel to unit sum. Entries must be non-negative and the
  // sum positive; the kernel must fit the target grid.
  static Psf make(int kernel_height, int kernel_width, std::vector<double> kernel,
                  int otf_height, int otf_width);

  static Psf delta(int otf_height, int otf_width);

  int kernel_height() const { return kh_; }
  int kernel_width() const { return kw_; }
  const std::vector<double>& kernel() const { return kernel_; }
  double kernel_at(int y, int x) const { return kernel_[static_cast<std::size_t>(y) * kw_ + x]; }

  int otf_height() const { return oh_; }
  int otf_width() const { return ow_; }
  const std::vector<std::complex<double>>& otf() const { return otf_; }

  // OTF recomputed at another grid size (the resize path for convolutions
  // against images that do not match the cached size).
  std::vector<std::complex<double>> otf_for(int h, int w) const;

  double max_otf_magnitude() const;

  // Same kernel re-targeted at a new grid size.
  Psf retargeted(int h, int w) const;

 private:
  Psf() = default;
  int kh_ = 0, kw_ = 0;
  std::vector<double> kernel_;
  int oh_ = 0, ow_ = 0;
  std::vector<std::complex<double>> otf_;
};

// DFT of the kernel placed center-at-origin on an h*w grid with circular
// wraparound. Throws if the kernel does not fit.
std::vector<std::complex<double>> compute_otf(const std::vector<double>& kernel,
                                              int kh, int kw, int h, int w);

// Circular (FFT-based) convolution; output dimensions equal input dimensions.
Image convolve(const Image& image, const Psf& psf);

// Adjoint of convolve (circular correlation, i.e. convolution with the
// mirrored kernel).
Image correlate(const Image& image, const Psf& psf);

}  // namespace pn2n
