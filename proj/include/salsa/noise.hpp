#pragma once

#include <cstdint>
#include <random>

namespace salsa {

/// Seeded standard-normal generator, reproducible across platforms.
///
/// Uniforms come from std::mt19937_64 (whose output sequence is fixed by the
/// C++ standard), using the top 53 bits: u = (bits + 1) * 2^-53 in (0, 1].
/// Pairs (u1, u2) go through the Box-Muller transform
///   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = sqrt(-2 ln u1) sin(2 pi u2)
/// and are returned z0 first, then z1.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  double uniform();

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace salsa
