#pragma once

#include <cstdint>

#include "pn2n/image.hpp"

namespace pn2n::harness {

// Procedural grayscale test scene: smooth background gradient plus random
// rectangles, disks and bars. Values stay within [0.05, 0.95] so the
// Sigmoid-bounded reconstruction can represent them. Deterministic per seed.
Image synth_scene(int size, std::uint64_t seed);

}  // namespace pn2n::harness
