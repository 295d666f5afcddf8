#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hmcpso {

// Seeded random stream. All draws go through the two helpers below instead of
// std::uniform_real_distribution / std::normal_distribution, whose algorithms
// are implementation-defined; this keeps traces reproducible across standard
// library versions. Every normal draw consumes exactly two uniforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1): 53-bit mantissa, never returns 1.0.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller. No caching of the second value, so the
  // draw count per call is fixed.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // Guard against log(0).
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hmcpso
