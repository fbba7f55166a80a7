#include "pn2n/nn_bridge.hpp"

#include <stdexcept>

namespace pn2n {

namespace {
// ping-pong mirror of index i onto [0, n)
int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}
}  // namespace

Image pad_to_multiple(const Image& img, int divisor) {
  const int h = img.height(), w = img.width();
  const int ph = (h % divisor == 0) ? h : (h / divisor + 1) * divisor;
  const int pw = (w % divisor == 0) ? w : (w / divisor + 1) * divisor;
  if (ph == h && pw == w) return img;
  Image out(ph, pw, 0.0);
  for (int y = 0; y < ph; ++y) {
    const int sy = mirror_index(y, h);
    for (int x = 0; x < pw; ++x) {
      out.at(y, x) = img.at(sy, mirror_index(x, w));
    }
  }
  return out;
}

nn::Tensor<float> batch_to_tensor(const std::vector<const Image*>& images) {
  if (images.empty()) throw std::invalid_argument("batch_to_tensor: empty batch");
  const int h = images[0]->height(), w = images[0]->width();
  nn::Tensor<float> t(static_cast<int>(images.size()), 1, h, w);
  for (std::size_t b = 0; b < images.size(); ++b) {
    require_same_size(*images[0], *images[b], "batch_to_tensor");
    const double* src = images[b]->data();
    float* dst = t.data() + t.offset(static_cast<int>(b), 0, 0, 0);
    for (int i = 0; i < h * w; ++i) dst[i] = static_cast<float>(src[i]);
  }
  return t;
}

Image tensor_to_image(const nn::Tensor<float>& t, int index, int crop_h, int crop_w) {
  const int h = crop_h > 0 ? crop_h : t.h;
  const int w = crop_w > 0 ? crop_w : t.w;
  Image out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(y, x) = static_cast<double>(t.at(index, 0, y, x));
    }
  }
  return out;
}

}  // namespace pn2n
