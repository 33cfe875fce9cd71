#pragma once

// Periodic (circular) blur operators represented by their DFT-domain gains.
//
// DFT convention: the forward transform is unnormalized and the inverse
// carries 1/n, so the OTF of the identity kernel is all ones and
// apply_filter(all-ones, x) == x.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salsa/image.hpp"

namespace salsa {

enum class BlurKind {
  Uniform9,          ///< square box blur, 9x9 by default
  GaussianExp2,      ///< exp(-(i^2 + j^2) / (2 s^2)), 15x15 and s = 2 by default
  InverseQuadratic,  ///< 1 / (1 + i^2 + j^2), 15x15 by default
};

std::string_view to_string(BlurKind kind);
/// Accepts the CLI spellings "uniform9", "gaussian" and "invquad".
BlurKind parse_blur_kind(std::string_view name);

/// Optional overrides for build_psf. Sizes must be odd and positive.
struct PsfParams {
  std::optional<int> size;
  std::optional<double> gaussian_std;
};

inline constexpr int kDefaultUniformSize = 9;
inline constexpr int kDefaultGaussianSize = 15;
inline constexpr double kDefaultGaussianStd = 2.0;
inline constexpr int kDefaultInverseQuadraticSize = 15;

/// Normalized blur kernel with odd support; the origin is the central tap.
class Psf {
 public:
  /// Normalizes `taps` to unit sum. Throws std::invalid_argument for even
  /// dimensions, a length mismatch, non-finite taps or a zero sum.
  static Psf from_taps(std::size_t support_height, std::size_t support_width, std::vector<double> taps);

  std::size_t support_height() const { return height_; }
  std::size_t support_width() const { return width_; }
  std::size_t center_row() const { return height_ / 2; }
  std::size_t center_col() const { return width_ / 2; }

  double tap(std::size_t row, std::size_t col) const { return taps_[row * width_ + col]; }
  /// Tap at offset (di, dj) from the center; zero outside the support.
  double at_offset(long di, long dj) const;
  const std::vector<double>& taps() const { return taps_; }

 private:
  Psf(std::size_t h, std::size_t w, std::vector<double> taps) : height_(h), width_(w), taps_(std::move(taps)) {}

  std::size_t height_;
  std::size_t width_;
  std::vector<double> taps_;
};

Psf build_psf(BlurKind kind, const PsfParams& params = {});

/// Complex DFT-domain gains on a full H x W grid.
class FreqFilter {
 public:
  FreqFilter() = default;
  FreqFilter(Shape shape, std::vector<std::complex<double>> values);

  const Shape& shape() const { return shape_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  std::complex<double> operator()(std::size_t row, std::size_t col) const {
    return values_[row * shape_.width + col];
  }

  /// True when values(-k) == conj(values(k)), i.e. the filter maps real images
  /// to real images. Such filters take the real-to-complex FFT path.
  bool hermitian() const { return hermitian_; }

  /// Largest |value|^2; for an OTF this is the squared spectral norm of H.
  double max_squared_gain() const;

 private:
  Shape shape_;
  std::vector<std::complex<double>> values_;
  bool hermitian_ = false;
};

/// Zero-pads `psf` to `shape`, rolls its center to (0, 0) and takes the DFT.
FreqFilter psf_to_otf(const Psf& psf, Shape shape);

/// Real part of IDFT(filter .* DFT(image)).
ImageBuffer apply_filter(const FreqFilter& filter, const ImageBuffer& image);

/// Same as apply_filter with the conjugated filter: the adjoint operator.
ImageBuffer adjoint_filter(const FreqFilter& filter, const ImageBuffer& image);

/// Gains |d|^2 / (|d|^2 + mu) of the regularized inversion filter
/// F = U^H D^* (|D|^2 + mu I)^{-1} D U. Every gain is real and lies in [0, 1).
FreqFilter build_inversion_filter(const FreqFilter& otf, double mu);

/// Gains |d|^2, i.e. the filter of H^T H.
FreqFilter gram_filter(const FreqFilter& otf);

}  // namespace salsa
