#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pn2n {

// Smallest side supported anywhere in the pipeline; the deepest U-Net path
// dictates it.
inline constexpr int kMinImageDim = 8;

// 2-D grayscale intensity field, row-major doubles. Nominal range is [0,1];
// values may leave that range after noise synthesis. clamped() records
// whether [0,1] clipping has been applied.
class Image {
 public:
  Image() = default;
  Image(int height, int width, double fill = 0.0);

  // Takes ownership of `data` (size height*width); rejects NaN/Inf.
  static Image from_data(int height, int width, std::vector<double> data);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(int y, int x) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  double* data() { return pixels_.data(); }
  const double* data() const { return pixels_.data(); }
  std::vector<double>& pixels() { return pixels_; }
  const std::vector<double>& pixels() const { return pixels_; }

  bool clamped() const { return clamped_; }
  void set_clamped(bool v) { clamped_ = v; }

  Image clamped_copy(double lo = 0.0, double hi = 1.0) const;

  bool all_finite() const;
  double mean() const;
  double min_value() const;
  double max_value() const;

  Image& operator+=(const Image& other);
  Image& operator-=(const Image& other);
  Image& operator+=(double v);
  Image& operator*=(double v);

 private:
  int height_ = 0;
  int width_ = 0;
  bool clamped_ = false;
  std::vector<double> pixels_;
};

Image operator+(Image a, const Image& b);
Image operator-(Image a, const Image& b);
Image operator*(Image a, double v);

// Throws std::invalid_argument naming `what` when dimensions differ.
void require_same_size(const Image& a, const Image& b, const std::string& what);

}  // namespace pn2n
