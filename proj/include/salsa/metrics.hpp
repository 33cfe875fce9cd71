#pragma once

#include "salsa/image.hpp"

namespace salsa {

/// Improvement in SNR, 10 log10(||y - x||^2 / ||x_hat - x||^2) in dB.
/// Returns +infinity when x_hat == x exactly.
double isnr(const ImageBuffer& x_true, const ImageBuffer& y, const ImageBuffer& x_hat);

}  // namespace salsa
