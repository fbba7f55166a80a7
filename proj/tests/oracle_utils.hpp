#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately naive (double loops, direct formula transcriptions) and must
// not share code paths with the library implementations they check.

#include <cmath>
#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/psf.hpp"
#include "pn2n/rng.hpp"

namespace oracle {

// Circular convolution by direct spatial double loop, kernel center at
// (kh/2, kw/2).
inline pn2n::Image spatial_convolve(const pn2n::Image& img, const std::vector<double>& kernel,
                                    int kh, int kw) {
  const int h = img.height(), w = img.width();
  const int cy = kh / 2, cx = kw / 2;
  pn2n::Image out(h, w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kh; ++i) {
        for (int j = 0; j < kw; ++j) {
          const int sy = ((y - (i - cy)) % h + h) % h;
          const int sx = ((x - (j - cx)) % w + w) % w;
          acc += kernel[static_cast<std::size_t>(i) * kw + j] * img.at(sy, sx);
        }
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

// SSIM by direct per-window recomputation (7x7 uniform window, L=1).
inline double reference_ssim(const pn2n::Image& a, const pn2n::Image& b) {
  const int win = 7;
  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const int h = a.height(), w = a.width();
  double total = 0.0;
  int count = 0;
  for (int y = 0; y + win <= h; ++y) {
    for (int x = 0; x + win <= w; ++x) {
      double ma = 0, mb = 0;
      for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
          ma += a.at(y + i, x + j);
          mb += b.at(y + i, x + j);
        }
      ma /= win * win;
      mb /= win * win;
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
          const double da = a.at(y + i, x + j) - ma;
          const double db = b.at(y + i, x + j) - mb;
          va += da * da;
          vb += db * db;
          cov += da * db;
        }
      va /= win * win;
      vb /= win * win;
      cov /= win * win;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / count;
}

inline pn2n::Image random_image(int h, int w, pn2n::Rng& rng, double lo = 0.0, double hi = 1.0) {
  pn2n::Image img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(y, x) = rng.uniform(lo, hi);
  return img;
}

inline std::vector<double> random_kernel(int kh, int kw, pn2n::Rng& rng) {
  std::vector<double> k(static_cast<std::size_t>(kh) * kw);
  double sum = 0.0;
  for (double& v : k) {
    v = rng.uniform();
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

inline double max_abs_diff(const pn2n::Image& a, const pn2n::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

}  // namespace oracle
