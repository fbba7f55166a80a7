#include "pn2n/harness/scenes.hpp"

#include <algorithm>
#include <cmath>

#include "pn2n/rng.hpp"

namespace pn2n::harness {

Image synth_scene(int size, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "synth-scene"));
  Image img(size, size, 0.0);

  // smooth background: tilted plane plus one low spatial frequency
  const double gx = rng.uniform(-0.3, 0.3), gy = rng.uniform(-0.3, 0.3);
  const double ph = rng.uniform(0.0, 2.0 * M_PI);
  const double amp = rng.uniform(0.05, 0.15);
  const double base = rng.uniform(0.35, 0.55);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      img.at(y, x) = base + gx * (x - size / 2.0) / size + gy * (y - size / 2.0) / size +
                     amp * std::sin(2.0 * M_PI * (x + y) / size + ph);
    }
  }

  // rectangles
  const int n_rects = 3 + static_cast<int>(rng.uniform() * 4);
  for (int r = 0; r < n_rects; ++r) {
    const int rw = 3 + static_cast<int>(rng.uniform() * (size / 3));
    const int rh = 3 + static_cast<int>(rng.uniform() * (size / 3));
    const int x0 = static_cast<int>(rng.uniform() * (size - rw));
    const int y0 = static_cast<int>(rng.uniform() * (size - rh));
    const double v = rng.uniform(0.1, 0.9);
    for (int y = y0; y < y0 + rh; ++y)
      for (int x = x0; x < x0 + rw; ++x) img.at(y, x) = v;
  }

  // disks
  const int n_disks = 2 + static_cast<int>(rng.uniform() * 3);
  for (int d = 0; d < n_disks; ++d) {
    const double rad = 2.0 + rng.uniform() * (size / 6.0);
    const double cx = rng.uniform() * size, cy = rng.uniform() * size;
    const double v = rng.uniform(0.1, 0.9);
    const int lo_y = std::max(0, static_cast<int>(cy - rad) - 1);
    const int hi_y = std::min(size - 1, static_cast<int>(cy + rad) + 1);
    for (int y = lo_y; y <= hi_y; ++y) {
      for (int x = 0; x < size; ++x) {
        if (std::hypot(x - cx, y - cy) <= rad) img.at(y, x) = v;
      }
    }
  }

  // bars
  const int n_bars = 1 + static_cast<int>(rng.uniform() * 2);
  for (int b = 0; b < n_bars; ++b) {
    const bool horizontal = rng.uniform() < 0.5;
    const int thickness = 1 + static_cast<int>(rng.uniform() * 3);
    const int pos = static_cast<int>(rng.uniform() * (size - thickness));
    const double v = rng.uniform(0.1, 0.9);
    for (int t = 0; t < thickness; ++t) {
      for (int i = 0; i < size; ++i) {
        if (horizontal) {
          img.at(pos + t, i) = v;
        } else {
          img.at(i, pos + t) = v;
        }
      }
    }
  }

  for (std::size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = std::clamp(img.data()[i], 0.05, 0.95);
  }
  return img;
}

}  // namespace pn2n::harness
