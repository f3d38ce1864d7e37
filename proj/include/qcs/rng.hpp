#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace qcs {

/**
 * Deterministic random source. All randomness in the library and CLI flows
 * through this wrapper; the uniform mapping from raw 64-bit draws is spelled
 * out here (rather than using std::uniform_real_distribution) so that a given
 * seed yields the same sequence on every platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(static_cast<double>(hi - lo + 1) * uniform01());
  }

  std::complex<double> complex_in_box(double half_width) {
    double re = uniform(-half_width, half_width);
    double im = uniform(-half_width, half_width);
    return {re, im};
  }

  bool coin() { return uniform01() < 0.5; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace qcs
