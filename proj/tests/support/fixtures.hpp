#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "salsa/convolution.hpp"
#include "salsa/frame.hpp"
#include "salsa/image.hpp"
#include "salsa/pgm.hpp"

namespace salsa::testing {

inline ImageBuffer random_image(Shape shape, std::mt19937_64& rng, double lo = 0.0, double hi = 255.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ImageBuffer img(shape);
  for (double& v : img.values()) v = dist(rng);
  return img;
}

inline FrameCoeffs random_coeffs(Shape shape, int levels, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  FrameCoeffs c(shape, levels);
  for (double& v : c.values()) v = dist(rng);
  return c;
}

inline FreqFilter random_filter(Shape shape, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::complex<double>> v(shape.size());
  for (auto& z : v) z = {dist(rng), dist(rng)};
  return FreqFilter(shape, std::move(v));
}

inline Psf random_psf(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.05, 1.0);
  std::vector<double> taps(h * w);
  for (double& t : taps) t = dist(rng);
  return Psf::from_taps(h, w, std::move(taps));
}

inline FreqFilter all_ones_filter(Shape shape) {
  return FreqFilter(shape, std::vector<std::complex<double>>(shape.size(), {1.0, 0.0}));
}

/// Piecewise-smooth 8-bit-range test scene: shaded background, a bright disk,
/// dark rectangles, a ramp bar and a striped patch. Deterministic.
inline ImageBuffer phantom(Shape shape) {
  ImageBuffer img(shape);
  const double h = static_cast<double>(shape.height), w = static_cast<double>(shape.width);
  for (std::size_t r = 0; r < shape.height; ++r) {
    for (std::size_t c = 0; c < shape.width; ++c) {
      const double y = r / h, x = c / w;
      double v = 60.0 + 80.0 * x + 30.0 * std::sin(3.0 * std::numbers::pi * y);
      if ((x - 0.62) * (x - 0.62) + (y - 0.38) * (y - 0.38) < 0.04) v = 220.0 - 40.0 * y;
      if (x > 0.12 && x < 0.42 && y > 0.55 && y < 0.85) v = 25.0;
      if (x > 0.2 && x < 0.3 && y > 0.15 && y < 0.45) v = 190.0;
      if (x > 0.55 && x < 0.9 && y > 0.7 && y < 0.78) v = 40.0 + 200.0 * (x - 0.55) / 0.35;
      if (x > 0.7 && x < 0.9 && y > 0.1 && y < 0.25) v = ((c / 3) % 2) ? 230.0 : 70.0;
      img(r, c) = v;
    }
  }
  return img;
}

/// The 256x256 benchmark scene: the PGM named by $SALSA_TEST_IMAGE when set,
/// else the bundled camera image, else the synthetic phantom.
inline ImageBuffer benchmark_image(std::string* source = nullptr) {
  if (const char* path = std::getenv("SALSA_TEST_IMAGE"); path != nullptr && *path != '\0') {
    if (source) *source = path;
    return read_image(path);
  }
#ifdef SALSA_BUNDLED_TEST_IMAGE
  if (std::filesystem::exists(SALSA_BUNDLED_TEST_IMAGE)) {
    if (source) *source = SALSA_BUNDLED_TEST_IMAGE;
    return read_image(SALSA_BUNDLED_TEST_IMAGE);
  }
#endif
  if (source) *source = "synthetic phantom 256x256";
  return phantom(Shape{256, 256});
}

}  // namespace salsa::testing
