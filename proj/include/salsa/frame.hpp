#pragma once

// Redundant (undecimated, a-trous) Haar frame with periodic extension.
//
// Analysis filters at level j use taps {1/2, 1/2} (lowpass) and {1/2, -1/2}
// (highpass) spaced 2^(j-1) apart, applied separably along rows and columns.
// Per dimension |l|^2 + |h|^2 = 1 at every frequency, so the analysis operator
// W^T is an isometry and its adjoint W (synthesis) satisfies W W^T = I.
//
// Subband order: (level 1: H, V, D), (level 2: H, V, D), ..., approximation.
//   H: highpass down the columns, lowpass along rows (horizontal edges)
//   V: highpass along rows, lowpass down the columns (vertical edges)
//   D: highpass in both directions

#include <cstddef>
#include <span>
#include <vector>

#include "salsa/image.hpp"

namespace salsa {

enum class Orientation { Horizontal = 0, Vertical = 1, Diagonal = 2 };

struct FrameSpec {
  int levels = 4;

  /// Throws std::invalid_argument if levels < 1 or the shape is not
  /// divisible by 2^levels in both dimensions.
  void validate_for(const Shape& shape) const;
  std::size_t subband_count() const { return 3 * static_cast<std::size_t>(levels) + 1; }
};

/// Coefficients of the redundant frame: 3*levels + 1 image-sized subbands
/// stored contiguously in the documented order.
class FrameCoeffs {
 public:
  FrameCoeffs() = default;
  FrameCoeffs(Shape shape, int levels, double fill = 0.0);

  const Shape& shape() const { return shape_; }
  int levels() const { return levels_; }
  std::size_t subband_count() const { return 3 * static_cast<std::size_t>(levels_) + 1; }
  /// Total coefficient count, (3 * levels + 1) * pixels.
  std::size_t size() const { return data_.size(); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  std::span<double> subband(std::size_t index);
  std::span<const double> subband(std::size_t index) const;
  std::span<double> detail(int level, Orientation o) { return subband(detail_index(level, o)); }
  std::span<const double> detail(int level, Orientation o) const { return subband(detail_index(level, o)); }
  std::span<double> approximation() { return subband(subband_count() - 1); }
  std::span<const double> approximation() const { return subband(subband_count() - 1); }

  bool same_layout(const FrameCoeffs& other) const {
    return shape_ == other.shape_ && levels_ == other.levels_;
  }
  bool all_finite() const;

 private:
  std::size_t detail_index(int level, Orientation o) const;

  Shape shape_;
  int levels_ = 0;
  std::vector<double> data_;
};

FrameCoeffs analysis(const ImageBuffer& image, const FrameSpec& spec);
ImageBuffer synthesis(const FrameCoeffs& coeffs, const FrameSpec& spec);

/// Out-parameter forms reuse the destination's storage when the layout
/// already matches; solvers call these once per iteration.
void analysis_into(const ImageBuffer& image, const FrameSpec& spec, FrameCoeffs& out);
void synthesis_into(const FrameCoeffs& coeffs, const FrameSpec& spec, ImageBuffer& out);

// Vector-space operations. All throw std::invalid_argument on layout mismatch.

/// y <- a * x + y
void coeffs_axpy(double a, const FrameCoeffs& x, FrameCoeffs& y);
FrameCoeffs coeffs_axpy(double a, const FrameCoeffs& x, const FrameCoeffs& y);
FrameCoeffs coeffs_scale(double a, const FrameCoeffs& x);
double coeffs_norm1(const FrameCoeffs& x);
double coeffs_norm2(const FrameCoeffs& x);
double coeffs_dot(const FrameCoeffs& x, const FrameCoeffs& y);

void require_same_layout(const FrameCoeffs& a, const FrameCoeffs& b, const char* what);

}  // namespace salsa
