#include "pn2n/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace pn2n::fft {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One cached plan with its own aligned buffers. FFTW plans record buffer
// alignment, so execution always goes through the owned buffers.
struct R2cPlan {
  int h = 0, w = 0;
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  void init(int hh, int ww) {
    h = hh;
    w = ww;
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(h) * w);
    cplx = fftw_alloc_complex(static_cast<std::size_t>(h) * (w / 2 + 1));
    fwd = fftw_plan_dft_r2c_2d(h, w, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(h, w, cplx, real, FFTW_ESTIMATE);
  }
  ~R2cPlan() {
    if (!fwd) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
};

struct C2cPlan {
  int h = 0, w = 0;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  void init(int hh, int ww) {
    h = hh;
    w = ww;
    std::lock_guard<std::mutex> lock(planner_mutex());
    in = fftw_alloc_complex(static_cast<std::size_t>(h) * w);
    out = fftw_alloc_complex(static_cast<std::size_t>(h) * w);
    fwd = fftw_plan_dft_2d(h, w, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(h, w, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~C2cPlan() {
    if (!fwd) return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(in);
    fftw_free(out);
  }
};

R2cPlan& r2c_plan(int h, int w) {
  thread_local std::map<std::pair<int, int>, R2cPlan> cache;
  auto [it, inserted] = cache.try_emplace({h, w});
  if (inserted) it->second.init(h, w);
  return it->second;
}

C2cPlan& c2c_plan(int h, int w) {
  thread_local std::map<std::pair<int, int>, C2cPlan> cache;
  auto [it, inserted] = cache.try_emplace({h, w});
  if (inserted) it->second.init(h, w);
  return it->second;
}

}  // namespace

// std::complex<double> is layout-compatible with fftw_complex (double[2])
void forward_r2c(int h, int w, const double* in, std::complex<double>* out) {
  R2cPlan& p = r2c_plan(h, w);
  std::memcpy(p.real, in, sizeof(double) * h * w);
  fftw_execute(p.fwd);
  std::memcpy(reinterpret_cast<double*>(out), p.cplx, sizeof(fftw_complex) * h * (w / 2 + 1));
}

void inverse_c2r(int h, int w, const std::complex<double>* in, double* out) {
  R2cPlan& p = r2c_plan(h, w);
  std::memcpy(p.cplx, reinterpret_cast<const double*>(in), sizeof(fftw_complex) * h * (w / 2 + 1));
  fftw_execute(p.bwd);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int i = 0; i < h * w; ++i) out[i] = p.real[i] * scale;
}

void forward_c2c(int h, int w, const std::complex<double>* in, std::complex<double>* out) {
  C2cPlan& p = c2c_plan(h, w);
  std::memcpy(p.in, reinterpret_cast<const double*>(in), sizeof(fftw_complex) * h * w);
  fftw_execute(p.fwd);
  std::memcpy(reinterpret_cast<double*>(out), p.out, sizeof(fftw_complex) * h * w);
}

void inverse_c2c(int h, int w, const std::complex<double>* in, std::complex<double>* out) {
  C2cPlan& p = c2c_plan(h, w);
  std::memcpy(p.in, reinterpret_cast<const double*>(in), sizeof(fftw_complex) * h * w);
  fftw_execute(p.bwd);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int i = 0; i < h * w; ++i) {
    out[i] = std::complex<double>(p.out[i][0] * scale, p.out[i][1] * scale);
  }
}

std::vector<std::complex<double>> dft2(const Image& img) {
  const int h = img.height(), w = img.width();
  std::vector<std::complex<double>> in(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = img.data()[i];
  std::vector<std::complex<double>> out(in.size());
  forward_c2c(h, w, in.data(), out.data());
  return out;
}

Image idft2_real(const std::vector<std::complex<double>>& spectrum, int h, int w) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(h) * w);
  inverse_c2c(h, w, spectrum.data(), out.data());
  std::vector<double> real(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) real[i] = out[i].real();
  return Image::from_data(h, w, std::move(real));
}

}  // namespace pn2n::fft
