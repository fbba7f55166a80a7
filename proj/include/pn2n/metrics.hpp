#pragma once

#include "pn2n/image.hpp"

namespace pn2n {

struct QualityReport {
  double psnr = 0.0;  // dB
  double ssim = 0.0;
};

inline constexpr double kPsnrCap = 100.0;

// 10*log10(peak^2 / MSE), capped at 100 dB (MSE below 1e-20 counts as zero).
double psnr(const Image& reference, const Image& test, double peak = 1.0);

// Mean structural similarity, 7x7 uniform window, C1=(0.01*L)^2,
// C2=(0.03*L)^2, L=1. Windows fully inside the image.
double ssim(const Image& reference, const Image& test);

QualityReport quality(const Image& reference, const Image& test);

}  // namespace pn2n
