#pragma once

#include <filesystem>

#include "pn2n/image.hpp"

namespace pn2n {

// Grayscale raster I/O. PNG (8/16-bit gray) and a raw float container:
// magic "PN2NIMG1", height and width as 32-bit little-endian unsigned
// integers, then row-major 32-bit little-endian floats.

// Dispatches on file content (PNG signature vs container magic).
Image load_image(const std::filesystem::path& path);

// Dispatches on extension: .png -> 8-bit PNG (clamped to [0,1] for export),
// anything else -> float container (values preserved unclipped).
void save_image(const Image& image, const std::filesystem::path& path);

void save_png(const Image& image, const std::filesystem::path& path, int bit_depth = 8);
void save_float_image(const Image& image, const std::filesystem::path& path);
Image load_float_image(const std::filesystem::path& path);

}  // namespace pn2n
