#pragma once

#include <cmath>

#include "salsa/convolution.hpp"
#include "salsa/frame.hpp"

namespace salsa {

enum class RegularizerKind { L1 };

/// The penalty phi in  1/2 ||H W beta - y||^2 + tau * phi(beta).
struct Regularizer {
  RegularizerKind kind = RegularizerKind::L1;
  /// When false the approximation subband is left unpenalized (and is passed
  /// through the proximal map untouched).
  bool penalize_approximation = true;
};

/// sign(a) * max(|a| - t, 0)
inline double soft_threshold(double a, double t) {
  const double m = std::abs(a) - t;
  return m > 0.0 ? std::copysign(m, a) : 0.0;
}

/// argmin_b 1/2 ||a - b||^2 + threshold * phi(b). Throws on threshold < 0.
FrameCoeffs prox(const Regularizer& reg, const FrameCoeffs& coeffs, double threshold);
void prox_inplace(const Regularizer& reg, FrameCoeffs& coeffs, double threshold);

/// phi(coeffs), e.g. the l1 norm over the penalized subbands.
double penalty(const Regularizer& reg, const FrameCoeffs& coeffs);

/// 1/2 ||apply_filter(otf, synthesis(coeffs)) - y||^2 + tau * phi(coeffs).
double objective(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& spec, const Regularizer& reg,
                 const FrameCoeffs& coeffs, double tau);
double objective(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& spec, const FrameCoeffs& coeffs,
                 double tau);

}  // namespace salsa
