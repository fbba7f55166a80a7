#include "pn2n/psf.hpp"

#include <cmath>
#include <stdexcept>

#include "pn2n/fft.hpp"

namespace pn2n {

std::vector<std::complex<double>> compute_otf(const std::vector<double>& kernel,
                                              int kh, int kw, int h, int w) {
  if (kh > h || kw > w) {
    throw std::invalid_argument("compute_otf: kernel support exceeds grid (" +
                                std::to_string(kh) + "x" + std::to_string(kw) + " on " +
                                std::to_string(h) + "x" + std::to_string(w) + ")");
  }
  // kernel center lands on (0,0); negative taps wrap around
  std::vector<std::complex<double>> padded(static_cast<std::size_t>(h) * w, 0.0);
  const int cy = kh / 2, cx = kw / 2;
  for (int i = 0; i < kh; ++i) {
    for (int j = 0; j < kw; ++j) {
      const int y = ((i - cy) % h + h) % h;
      const int x = ((j - cx) % w + w) % w;
      padded[static_cast<std::size_t>(y) * w + x] += kernel[static_cast<std::size_t>(i) * kw + j];
    }
  }
  std::vector<std::complex<double>> otf(padded.size());
  fft::forward_c2c(h, w, padded.data(), otf.data());
  return otf;
}

Psf Psf::make(int kernel_height, int kernel_width, std::vector<double> kernel,
              int otf_height, int otf_width) {
  if (kernel_height <= 0 || kernel_width <= 0 ||
      kernel.size() != static_cast<std::size_t>(kernel_height) * kernel_width) {
    throw std::invalid_argument("Psf::make: bad kernel dimensions");
  }
  double sum = 0.0;
  for (double v : kernel) {
    if (!std::isfinite(v)) throw std::invalid_argument("Psf::make: non-finite kernel entry");
    if (v < 0.0) throw std::invalid_argument("Psf::make: negative kernel entry");
    sum += v;
  }
  if (sum <= 0.0) throw std::invalid_argument("Psf::make: kernel sums to zero");
  for (double& v : kernel) v /= sum;

  Psf p;
  p.kh_ = kernel_height;
  p.kw_ = kernel_width;
  p.kernel_ = std::move(kernel);
  p.oh_ = otf_height;
  p.ow_ = otf_width;
  p.otf_ = compute_otf(p.kernel_, p.kh_, p.kw_, otf_height, otf_width);
  return p;
}

Psf Psf::delta(int otf_height, int otf_width) {
  return make(1, 1, {1.0}, otf_height, otf_width);
}

std::vector<std::complex<double>> Psf::otf_for(int h, int w) const {
  if (h == oh_ && w == ow_) return otf_;
  return compute_otf(kernel_, kh_, kw_, h, w);
}

double Psf::max_otf_magnitude() const {
  double m = 0.0;
  for (const auto& v : otf_) m = std::max(m, std::abs(v));
  return m;
}

Psf Psf::retargeted(int h, int w) const {
  return make(kh_, kw_, kernel_, h, w);
}

namespace {

// Multiply the image spectrum by the (optionally conjugated) OTF. Uses the
// half-spectrum transform; the full OTF is indexed on its first w/2+1 columns.
Image apply_otf(const Image& image, const Psf& psf, bool conjugate) {
  const int h = image.height(), w = image.width();
  if (psf.kernel_height() > h || psf.kernel_width() > w) {
    throw std::invalid_argument("convolve: psf kernel does not fit within image dimensions");
  }
  const std::vector<std::complex<double>> otf = psf.otf_for(h, w);
  const int wc = w / 2 + 1;
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(h) * wc);
  fft::forward_r2c(h, w, image.data(), spec.data());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wc; ++x) {
      const std::complex<double> k = otf[static_cast<std::size_t>(y) * w + x];
      spec[static_cast<std::size_t>(y) * wc + x] *= conjugate ? std::conj(k) : k;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(h) * w);
  fft::inverse_c2r(h, w, spec.data(), out.data());
  return Image::from_data(h, w, std::move(out));
}

}  // namespace

Image convolve(const Image& image, const Psf& psf) { return apply_otf(image, psf, false); }

Image correlate(const Image& image, const Psf& psf) { return apply_otf(image, psf, true); }

}  // namespace pn2n
