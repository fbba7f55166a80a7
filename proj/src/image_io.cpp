#include "pn2n/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

namespace pn2n {

namespace {

constexpr char kFloatMagic[8] = {'P', 'N', '2', 'N', 'I', 'M', 'G', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw std::runtime_error("cannot open file: " + path.string());
  return f;
}

void put_u32le(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  if (std::fwrite(b, 1, 4, f) != 4) throw std::runtime_error("write failure");
}

std::uint32_t get_u32le(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw std::runtime_error("truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

Image load_png_file(std::FILE* f, const std::filesystem::path& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<double> pixels;
  int h = 0, w = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unreadable PNG: " + path.string());
  }
  png_init_io(png, f);
  png_read_info(png, info);
  w = static_cast<int>(png_get_image_width(png, info));
  h = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG color type (grayscale only): " + path.string());
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_swap(png);  // little-endian samples in memory
  png_read_update_info(png, info);

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  std::vector<unsigned char> row(row_bytes);
  pixels.resize(static_cast<std::size_t>(h) * w);
  const double scale8 = 1.0 / 255.0, scale16 = 1.0 / 65535.0;
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    if (depth == 16) {
      const std::uint16_t* r16 = reinterpret_cast<const std::uint16_t*>(row.data());
      for (int x = 0; x < w; ++x) pixels[static_cast<std::size_t>(y) * w + x] = r16[x] * scale16;
    } else {
      for (int x = 0; x < w; ++x) pixels[static_cast<std::size_t>(y) * w + x] = row[x] * scale8;
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  Image img = Image::from_data(h, w, std::move(pixels));
  img.set_clamped(true);
  return img;
}

}  // namespace

void save_png(const Image& image, const std::filesystem::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw std::invalid_argument("save_png: bit depth must be 8 or 16");
  }
  const Image clamped = image.clamped_copy();
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG write failed: " + path.string());
  }
  png_init_io(png, f.get());
  const int h = image.height(), w = image.width();
  png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);

  if (bit_depth == 8) {
    std::vector<unsigned char> row(w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        row[x] = static_cast<unsigned char>(std::lround(clamped.at(y, x) * 255.0));
      }
      png_write_row(png, row.data());
    }
  } else {
    std::vector<std::uint16_t> row(w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        row[x] = static_cast<std::uint16_t>(std::lround(clamped.at(y, x) * 65535.0));
      }
      png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_float_image(const Image& image, const std::filesystem::path& path) {
  FilePtr f = open_file(path, "wb");
  if (std::fwrite(kFloatMagic, 1, 8, f.get()) != 8) throw std::runtime_error("write failure");
  put_u32le(f.get(), static_cast<std::uint32_t>(image.height()));
  put_u32le(f.get(), static_cast<std::uint32_t>(image.width()));
  std::vector<float> buf(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) buf[i] = static_cast<float>(image.data()[i]);
  if (std::fwrite(buf.data(), sizeof(float), buf.size(), f.get()) != buf.size()) {
    throw std::runtime_error("write failure: " + path.string());
  }
}

Image load_float_image(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kFloatMagic, 8) != 0) {
    throw std::runtime_error("not a PN2NIMG1 container: " + path.string());
  }
  const int h = static_cast<int>(get_u32le(f.get()));
  const int w = static_cast<int>(get_u32le(f.get()));
  std::vector<float> buf(static_cast<std::size_t>(h) * w);
  if (std::fread(buf.data(), sizeof(float), buf.size(), f.get()) != buf.size()) {
    throw std::runtime_error("truncated container: " + path.string());
  }
  std::vector<double> pixels(buf.begin(), buf.end());
  return Image::from_data(h, w, std::move(pixels));
}

Image load_image(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, f.get()) != 8) throw std::runtime_error("truncated file: " + path.string());
  if (png_sig_cmp(sig, 0, 8) == 0) {
    std::rewind(f.get());
    // png_init_io expects the signature unread only if told; simplest is a fresh read
    std::fseek(f.get(), 0, SEEK_SET);
    return load_png_file(f.get(), path);
  }
  if (std::memcmp(sig, kFloatMagic, 8) == 0) {
    return load_float_image(path);
  }
  throw std::runtime_error("unsupported image format: " + path.string());
}

void save_image(const Image& image, const std::filesystem::path& path) {
  if (path.extension() == ".png") {
    save_png(image, path);
  } else {
    save_float_image(image, path);
  }
}

}  // namespace pn2n
