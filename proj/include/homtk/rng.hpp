#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "homtk/units.hpp"

// Seeded sampling helpers. The distributions are hand rolled on top of the
// raw mt19937_64 output because the std::*_distribution classes are
// implementation defined; simulation streams must be bit reproducible for a
// given (seed, chunk_count, config) tuple.

namespace homtk::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stable sub-seed for (seed, lane, index); every chunk and noise source of a
// simulation owns an independent stream derived this way.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t lane,
                                 std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc908ULL) +
                    splitmix64(lane * 0x100000001b3ULL + index));
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0,1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // uniform in (0,1]
  double uniform_pos() {
    return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  double exponential(double mean) { return -std::log(uniform_pos()) * mean; }

  // Box-Muller; draws two uniforms per call, keeps no state.
  double normal(double sigma = 1.0) {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace homtk::rng
