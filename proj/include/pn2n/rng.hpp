#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pn2n {

// splitmix64 finalizer. Seeds for child streams are derived through this so
// the (master -> module -> scene -> frame) hierarchy never reuses a stream.
inline std::uint64_t mix_seed(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) {
  return mix_seed(parent ^ mix_seed(child + 0x517cc1b727220a95ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

// Deterministic random stream. Samplers are implemented explicitly
// (Box-Muller, Knuth Poisson) instead of std:: distributions, whose output
// is implementation-defined; byte-identical replay across toolchains depends
// on this.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  // uniform in [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Poisson sample, Knuth's product-of-uniforms method (fine for mean <~ 100)
  long poisson(double mean);

  std::uint64_t raw() { return gen_(); }

  std::uint64_t seed() const { return seed_; }

  Rng child(std::uint64_t index) const { return Rng(derive_seed(seed_, index)); }

 private:
  std::uint64_t seed_ = 0;
  std::mt19937_64 gen_;
};

}  // namespace pn2n
