#pragma once

#include <cstdint>
#include <string>

#include "pn2n/psf.hpp"

namespace pn2n {

// Parametric defocus PSF surrogates.
struct PsfShape {
  enum class Kind { Disk, Gaussian, Annulus };
  Kind kind = Kind::Disk;
  double radius = 0.0;            // Disk
  double sigma = 0.0;             // Gaussian
  double r_in = 0.0, r_out = 0.0; // Annulus

  static PsfShape disk(double radius) { return {Kind::Disk, radius, 0, 0, 0}; }
  static PsfShape gaussian(double sigma) { return {Kind::Gaussian, 0, sigma, 0, 0}; }
  static PsfShape annulus(double r_in, double r_out) { return {Kind::Annulus, 0, 0, r_in, r_out}; }
};

// Disk is the circle-of-confusion defocus model (antialiased by
// supersampling); Gaussian is truncated at 4 sigma; Annulus is a filled ring.
// grid_size sets the cached OTF target (square grid).
Psf make_psf(const PsfShape& shape, int grid_size);

enum class PerturbMode { Blur, Noise };

// Blur: convolve the kernel with a Gaussian of the given sigma, renormalize.
// Noise: add zero-mean Gaussian with stddev = percent/100 * max(kernel),
// clip negatives, renormalize. Throws if everything clips to zero.
Psf perturb_psf(const Psf& psf, PerturbMode mode, double amount, std::uint64_t seed);

// Benchmark surrogates psf-1..psf-5, ordered by increasing severity.
Psf benchmark_psf(int index, int grid_size);
PsfShape benchmark_psf_shape(int index);
std::string psf_shape_label(const PsfShape& shape);

}  // namespace pn2n
