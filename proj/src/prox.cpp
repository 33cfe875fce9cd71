#include "salsa/prox.hpp"

#include <stdexcept>
#include <string>

namespace salsa {

namespace {

std::size_t penalized_count(const Regularizer& reg, const FrameCoeffs& c) {
  return reg.penalize_approximation ? c.size() : c.size() - c.shape().size();
}

}  // namespace

void prox_inplace(const Regularizer& reg, FrameCoeffs& coeffs, double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("prox threshold must be a finite nonnegative number, got " + std::to_string(threshold));
  }
  auto v = coeffs.values().first(penalized_count(reg, coeffs));
  for (double& a : v) a = soft_threshold(a, threshold);
}

FrameCoeffs prox(const Regularizer& reg, const FrameCoeffs& coeffs, double threshold) {
  FrameCoeffs out = coeffs;
  prox_inplace(reg, out, threshold);
  return out;
}

double penalty(const Regularizer& reg, const FrameCoeffs& coeffs) {
  double s = 0.0;
  for (double a : coeffs.values().first(penalized_count(reg, coeffs))) s += std::abs(a);
  return s;
}

double objective(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& spec, const Regularizer& reg,
                 const FrameCoeffs& coeffs, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("objective: tau must be nonnegative");
  require_same_shape(y.shape(), otf.shape(), "objective");
  require_same_shape(y.shape(), coeffs.shape(), "objective");
  const ImageBuffer blurred = apply_filter(otf, synthesis(coeffs, spec));
  double fit = 0.0;
  const auto b = blurred.values();
  const auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) {
    const double r = b[i] - yv[i];
    fit += r * r;
  }
  return 0.5 * fit + tau * penalty(reg, coeffs);
}

double objective(const ImageBuffer& y, const FreqFilter& otf, const FrameSpec& spec, const FrameCoeffs& coeffs,
                 double tau) {
  return objective(y, otf, spec, Regularizer{}, coeffs, tau);
}

}  // namespace salsa
