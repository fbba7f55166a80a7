#include "pn2n/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pn2n {

double psnr(const Image& reference, const Image& test, double peak) {
  require_same_size(reference, test, "psnr");
  if (peak <= 0.0) throw std::invalid_argument("psnr: peak must be positive");
  double mse = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.data()[i] - test.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(reference.size());
  if (mse < 1e-20) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

namespace {
constexpr int kWindow = 7;

// box-filtered means via running column sums; one row of windows at a time
std::vector<double> box_means(const Image& img, const std::vector<double>& vals) {
  const int h = img.height(), w = img.width();
  const int oh = h - kWindow + 1, ow = w - kWindow + 1;
  std::vector<double> col(w, 0.0), out(static_cast<std::size_t>(oh) * ow);
  const double inv = 1.0 / (kWindow * kWindow);
  for (int y = 0; y < kWindow; ++y)
    for (int x = 0; x < w; ++x) col[x] += vals[static_cast<std::size_t>(y) * w + x];
  for (int oy = 0;; ++oy) {
    double s = 0.0;
    for (int x = 0; x < kWindow; ++x) s += col[x];
    for (int ox = 0;; ++ox) {
      out[static_cast<std::size_t>(oy) * ow + ox] = s * inv;
      if (ox + 1 >= ow) break;
      s += col[ox + kWindow] - col[ox];
    }
    if (oy + 1 >= oh) break;
    for (int x = 0; x < w; ++x) {
      col[x] += vals[static_cast<std::size_t>(oy + kWindow) * w + x] -
                vals[static_cast<std::size_t>(oy) * w + x];
    }
  }
  return out;
}
}  // namespace

double ssim(const Image& reference, const Image& test) {
  require_same_size(reference, test, "ssim");
  const int h = reference.height(), w = reference.width();
  if (h < kWindow || w < kWindow) {
    throw std::invalid_argument("ssim: image smaller than the 7x7 window");
  }
  const double L = 1.0;
  const double c1 = (0.01 * L) * (0.01 * L);
  const double c2 = (0.03 * L) * (0.03 * L);

  const std::size_t n = reference.size();
  std::vector<double> a(reference.pixels());
  std::vector<double> b(test.pixels());
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = box_means(reference, a);
  const auto mu_b = box_means(reference, b);
  const auto m_aa = box_means(reference, aa);
  const auto m_bb = box_means(reference, bb);
  const auto m_ab = box_means(reference, ab);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = m_aa[i] - mu_a[i] * mu_a[i];
    const double vb = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

QualityReport quality(const Image& reference, const Image& test) {
  return QualityReport{psnr(reference, test), ssim(reference, test)};
}

}  // namespace pn2n
