#pragma once

#include <utility>
#include <vector>

#include "pn2n/image.hpp"
#include "pn2n/psf.hpp"

namespace pn2n {

// Default tolerance (relative to the DC magnitude) below which a measured
// |OTF| value counts as zero. Separates true ring zeros from float noise at
// 64-256 grid sizes.
inline constexpr double kDefaultZeroTol = 1e-3;

enum class OtfCondition { HasZero, DecayingNoZero, NeitherApplies };

struct OtfClassification {
  OtfCondition condition = OtfCondition::NeitherApplies;
  // frequency indices (fy, fx) of interior spectral zeros
  std::vector<std::pair<int, int>> zero_frequencies;
  // radially averaged |OTF|/DC: (radius in cycles/pixel, mean magnitude)
  std::vector<std::pair<double, double>> decay_profile;
};

// Classifies the PSF's transfer function on its cached grid. A sub-tolerance
// magnitude counts as a zero only when the radial spectrum rebounds beyond it
// (ring zeros); a monotone decayed tail is treated as decay, not zeros.
// Without interior zeros, a spectrum whose outermost band falls below 10% of
// DC is DecayingNoZero; anything else is NeitherApplies.
OtfClassification classify_psf(const Psf& psf, double zero_tol = kDefaultZeroTol);

struct ResidualFloor {
  // Minimum of sum((PSF (*) x - observation)^2) over all x: the Parseval sum
  // of observation energy at frequencies the operator cannot reach.
  double floor_value = 0.0;
  // per-frequency contributions, h*w, zero on feasible frequencies
  Image infeasible_energy_map;
};

ResidualFloor residual_floor(const Image& observation, const Psf& psf,
                             double zero_tol = kDefaultZeroTol);

struct DescentCurve {
  std::vector<double> loss;  // loss[t] after t steps; loss[0] is the start
  bool converged = true;
};

struct StagnationResult {
  DescentCurve biased;     // descent on ||PSF (*) x - y'||^2 with y' fixed
  DescentCurve corrected;  // joint descent with y' replaced by y' - b
};

// Least-squares descent traces on the biased observation
// y' = PSF (*) latent + bias_field, with and without a jointly descended
// bias estimate. Fixed step 1/max|OTF|^2; losses are pixel sums of squares.
StagnationResult stagnation_experiment(const Image& latent, const Psf& psf,
                                       const Image& bias_field, int steps);

}  // namespace pn2n
