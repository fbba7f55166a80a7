#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "oracle_utils.hpp"
#include "pn2n/fft.hpp"
#include "pn2n/image.hpp"
#include "pn2n/image_io.hpp"
#include "pn2n/metrics.hpp"
#include "pn2n/psf.hpp"
#include "pn2n/rng.hpp"

using namespace pn2n;

namespace {
std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "pn2n_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST_CASE("image basics and validation") {
  CHECK_THROWS(Image(4, 4));
  CHECK_THROWS(Image::from_data(8, 8, std::vector<double>(63, 0.0)));
  std::vector<double> bad(64, 0.0);
  bad[5] = std::nan("");
  CHECK_THROWS(Image::from_data(8, 8, std::move(bad)));

  Image img(8, 10, 0.5);
  CHECK(img.height() == 8);
  CHECK(img.width() == 10);
  CHECK(img.mean() == doctest::Approx(0.5));
  CHECK_FALSE(img.clamped());
  img.at(0, 0) = 2.0;
  Image c = img.clamped_copy();
  CHECK(c.clamped());
  CHECK(c.at(0, 0) == 1.0);
}

TEST_CASE("psf normalization and invariants") {
  Rng rng(11);
  auto kernel = oracle::random_kernel(5, 5, rng);
  for (double& v : kernel) v *= 7.3;  // deliberately unnormalized
  Psf psf = Psf::make(5, 5, kernel, 32, 32);

  double sum = 0.0;
  for (double v : psf.kernel()) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(psf.otf()[0]) == doctest::Approx(1.0).epsilon(1e-6));

  std::vector<double> neg = {0.5, -0.1, 0.6};
  CHECK_THROWS(Psf::make(1, 3, neg, 32, 32));
  CHECK_THROWS(Psf::make(33, 1, std::vector<double>(33, 1.0), 32, 32));
}

TEST_CASE("convolve: delta kernel is the identity") {
  Rng rng(1);
  Image img = oracle::random_image(16, 16, rng);
  Psf delta = Psf::delta(16, 16);
  Image out = convolve(img, delta);
  CHECK(oracle::max_abs_diff(img, out) < 1e-12);
}

TEST_CASE("convolve: unit-sum kernel preserves a constant image") {
  Rng rng(2);
  Image img(24, 24, 0.37);
  Psf psf = Psf::make(5, 5, oracle::random_kernel(5, 5, rng), 24, 24);
  Image out = convolve(img, psf);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out.data()[i] == doctest::Approx(0.37).epsilon(1e-10));
  }
}

TEST_CASE("convolve matches brute-force spatial convolution") {
  Rng rng(3);
  Image img = oracle::random_image(16, 16, rng);
  std::vector<double> uniform(9, 1.0 / 9.0);
  Psf psf = Psf::make(3, 3, uniform, 16, 16);
  Image expect = oracle::spatial_convolve(img, uniform, 3, 3);
  Image got = convolve(img, psf);
  CHECK(oracle::max_abs_diff(expect, got) < 1e-8);
}

TEST_CASE("convolve resizes the OTF for mismatched image sizes") {
  Rng rng(4);
  Psf psf = Psf::make(3, 3, oracle::random_kernel(3, 3, rng), 64, 64);
  Image img = oracle::random_image(16, 16, rng);
  Image got = convolve(img, psf);  // resize path
  Image expect = oracle::spatial_convolve(img, psf.kernel(), 3, 3);
  CHECK(oracle::max_abs_diff(expect, got) < 1e-8);

  Image tiny = oracle::random_image(8, 8, rng);
  Psf big = Psf::make(9, 9, oracle::random_kernel(9, 9, rng), 16, 16);
  CHECK_THROWS(convolve(tiny, big));  // kernel does not fit
}

TEST_CASE("convolution linearity") {
  Rng rng(5);
  Image u = oracle::random_image(20, 20, rng);
  Image v = oracle::random_image(20, 20, rng);
  Psf psf = Psf::make(5, 5, oracle::random_kernel(5, 5, rng), 20, 20);
  const double a = 1.7, b = -0.6;

  Image lhs_in = u * a + v * b;
  Image lhs = convolve(lhs_in, psf);
  Image rhs = convolve(u, psf) * a + convolve(v, psf) * b;
  CHECK(oracle::max_abs_diff(lhs, rhs) < 1e-6);
}

TEST_CASE("Fourier consistency: DFT(convolve) equals OTF * DFT") {
  Rng rng(6);
  Image x = oracle::random_image(32, 32, rng);
  Psf psf = Psf::make(7, 7, oracle::random_kernel(7, 7, rng), 32, 32);
  auto lhs = fft::dft2(convolve(x, psf));
  auto xs = fft::dft2(x);
  const auto& otf = psf.otf();
  double max_err = 0.0;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    max_err = std::max(max_err, std::abs(lhs[i] - otf[i] * xs[i]));
  }
  CHECK(max_err < 1e-6);
}

TEST_CASE("psnr formula and edge cases") {
  Image a(16, 16, 0.0);
  Image b(16, 16, 1.0);
  CHECK(psnr(a, a) == doctest::Approx(100.0));      // identical -> cap
  CHECK(psnr(a, b, 1.0) == doctest::Approx(0.0));   // MSE 1

  Rng rng(7);
  Image r = oracle::random_image(16, 16, rng);
  Image r2 = r;
  r2 += 0.1;
  CHECK(psnr(r, r2, 1.0) == doctest::Approx(20.0).epsilon(1e-9));  // MSE 0.01

  Image small(8, 8, 0.0);
  CHECK_THROWS(psnr(small, a));
  CHECK_THROWS(psnr(a, b, 0.0));
}

TEST_CASE("psnr is symmetric") {
  Rng rng(8);
  Image a = oracle::random_image(16, 16, rng);
  Image b = oracle::random_image(16, 16, rng);
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)));
}

TEST_CASE("ssim: identity, inversion, reference oracle") {
  Rng rng(9);
  Image a = oracle::random_image(16, 16, rng);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  Image inv = a;
  for (std::size_t i = 0; i < inv.size(); ++i) inv.data()[i] = 1.0 - inv.data()[i];
  CHECK(ssim(a, inv) < 1.0);

  // checkerboard + noise vs the naive reference implementation
  Image board(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) board.at(y, x) = ((x + y) % 2 == 0) ? 0.25 : 0.75;
  Image noisy = board;
  for (std::size_t i = 0; i < noisy.size(); ++i) noisy.data()[i] += rng.normal(0.0, 0.1);
  CHECK(ssim(board, noisy) == doctest::Approx(oracle::reference_ssim(board, noisy)).epsilon(1e-6));

  Image tiny(8, 8, 0.5);  // big enough for Image, fine for 7x7 window
  CHECK_NOTHROW(ssim(tiny, tiny));
}

TEST_CASE("float container round trip is exact") {
  Rng rng(10);
  Image img(16, 16);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = static_cast<float>(rng.uniform(-0.2, 1.4));  // float-representable
  }
  auto path = temp_path("roundtrip.pn2i");
  save_float_image(img, path);
  Image back = load_float_image(path);
  CHECK(oracle::max_abs_diff(img, back) == 0.0);

  // second save is byte-identical
  auto path2 = temp_path("roundtrip2.pn2i");
  save_float_image(back, path2);
  auto read_all = [](const std::filesystem::path& p) {
    std::FILE* f = std::fopen(p.string().c_str(), "rb");
    std::vector<unsigned char> buf(1 << 16);
    const std::size_t n = std::fread(buf.data(), 1, buf.size(), f);
    std::fclose(f);
    buf.resize(n);
    return buf;
  };
  CHECK(read_all(path) == read_all(path2));
}

TEST_CASE("8-bit png round trip stays within quantization error") {
  Rng rng(12);
  Image img = oracle::random_image(16, 16, rng);
  auto path = temp_path("gray8.png");
  save_png(img, path, 8);
  Image back = load_image(path);
  CHECK(oracle::max_abs_diff(img, back) <= 1.0 / 255.0 + 1e-12);
}

TEST_CASE("16-bit png midpoint scaling") {
  Image img(8, 8, 32768.0 / 65535.0);
  auto path = temp_path("gray16.png");
  save_png(img, path, 16);
  Image back = load_image(path);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(std::abs(back.data()[i] - 0.5) <= 1.0 / 65535.0);
  }
}

TEST_CASE("loader errors on unsupported input") {
  auto path = temp_path("garbage.bin");
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  std::fputs("this is not an image at all............", f);
  std::fclose(f);
  CHECK_THROWS(load_image(path));
  CHECK_THROWS(load_image(temp_path("missing_file.png")));
}
