#include "pn2n/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pn2n {

namespace {
void check_dims(int height, int width) {
  if (height < kMinImageDim || width < kMinImageDim) {
    throw std::invalid_argument("Image dimensions must be at least " +
                                std::to_string(kMinImageDim) + "x" +
                                std::to_string(kMinImageDim) + ", got " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
}
}  // namespace

Image::Image(int height, int width, double fill)
    : height_(height), width_(width),
      pixels_(static_cast<std::size_t>(height) * width, fill) {
  check_dims(height, width);
}

Image Image::from_data(int height, int width, std::vector<double> data) {
  check_dims(height, width);
  if (data.size() != static_cast<std::size_t>(height) * width) {
    throw std::invalid_argument("Image::from_data: buffer size does not match dimensions");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("Image::from_data: non-finite pixel");
  }
  Image img;
  img.height_ = height;
  img.width_ = width;
  img.pixels_ = std::move(data);
  return img;
}

Image Image::clamped_copy(double lo, double hi) const {
  Image out = *this;
  for (double& v : out.pixels_) v = std::clamp(v, lo, hi);
  out.clamped_ = true;
  return out;
}

bool Image::all_finite() const {
  return std::all_of(pixels_.begin(), pixels_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Image::mean() const {
  if (pixels_.empty()) return 0.0;
  return std::accumulate(pixels_.begin(), pixels_.end(), 0.0) / pixels_.size();
}

double Image::min_value() const {
  return *std::min_element(pixels_.begin(), pixels_.end());
}

double Image::max_value() const {
  return *std::max_element(pixels_.begin(), pixels_.end());
}

Image& Image::operator+=(const Image& other) {
  require_same_size(*this, other, "Image::operator+=");
  for (std::size_t i = 0; i < pixels_.size(); ++i) pixels_[i] += other.pixels_[i];
  return *this;
}

Image& Image::operator-=(const Image& other) {
  require_same_size(*this, other, "Image::operator-=");
  for (std::size_t i = 0; i < pixels_.size(); ++i) pixels_[i] -= other.pixels_[i];
  return *this;
}

Image& Image::operator+=(double v) {
  for (double& p : pixels_) p += v;
  return *this;
}

Image& Image::operator*=(double v) {
  for (double& p : pixels_) p *= v;
  return *this;
}

Image operator+(Image a, const Image& b) { a += b; return a; }
Image operator-(Image a, const Image& b) { a -= b; return a; }
Image operator*(Image a, double v) { a *= v; return a; }

void require_same_size(const Image& a, const Image& b, const std::string& what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw std::invalid_argument(what + ": dimension mismatch (" +
                                std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                                " vs " + std::to_string(b.height()) + "x" +
                                std::to_string(b.width()) + ")");
  }
}

}  // namespace pn2n
