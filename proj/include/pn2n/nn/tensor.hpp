#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pn2n::nn {

// Dense NCHW tensor.
template <typename T>
struct Tensor {
  int n = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  Tensor() = default;
  Tensor(int n_, int c_, int h_, int w_)
      : n(n_), c(c_), h(h_), w(w_),
        v(static_cast<std::size_t>(n_) * c_ * h_ * w_, T(0)) {}

  std::size_t size() const { return v.size(); }
  T* data() { return v.data(); }
  const T* data() const { return v.data(); }

  std::size_t offset(int in, int ic, int iy, int ix) const {
    return ((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix;
  }
  T& at(int in, int ic, int iy, int ix) { return v[offset(in, ic, iy, ix)]; }
  T at(int in, int ic, int iy, int ix) const { return v[offset(in, ic, iy, ix)]; }

  bool same_shape(const Tensor& o) const {
    return n == o.n && c == o.c && h == o.h && w == o.w;
  }
};

// Named view of a learnable parameter (or a persistent buffer when
// trainable is false).
template <typename T>
struct Param {
  std::string name;
  std::vector<T>* value = nullptr;
  std::vector<T>* grad = nullptr;  // null for buffers
  bool trainable = true;
};

}  // namespace pn2n::nn
