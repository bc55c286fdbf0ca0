// SPDX-License-Identifier: Apache-2.0

#ifndef DEGENLAB_RNG_HPP
#define DEGENLAB_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace degenlab {

/// Deterministic standard-normal stream. std::normal_distribution is
/// implementation-defined, so scans roll their own Box-Muller on top of
/// mt19937_64 to keep outputs identical across standard libraries.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // uniforms in (0,1]; u1 > 0 keeps the log finite
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::complex<double> complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }

  /// Derive an independent stream seed from a base seed and indices
  /// (splitmix64 over the mixed words), so parallel scan samples do not
  /// depend on scheduling order.
  static std::uint64_t derive(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace degenlab

#endif
