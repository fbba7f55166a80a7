#pragma once

#include <complex>
#include <vector>

#include "pn2n/image.hpp"

namespace pn2n::fft {

// 2-D DFT helpers on row-major arrays. Plans are cached per thread; plan
// creation is serialized internally (FFTW requirement), execution is not.

// real h*w -> half spectrum h*(w/2+1)
void forward_r2c(int h, int w, const double* in, std::complex<double>* out);

// half spectrum h*(w/2+1) -> real h*w, scaled by 1/(h*w)
void inverse_c2r(int h, int w, const std::complex<double>* in, double* out);

void forward_c2c(int h, int w, const std::complex<double>* in, std::complex<double>* out);

// scaled by 1/(h*w)
void inverse_c2c(int h, int w, const std::complex<double>* in, std::complex<double>* out);

// Full h*w spectrum of an image (convenience for analysis code).
std::vector<std::complex<double>> dft2(const Image& img);

// Real part of the inverse full-spectrum DFT.
Image idft2_real(const std::vector<std::complex<double>>& spectrum, int h, int w);

}  // namespace pn2n::fft
