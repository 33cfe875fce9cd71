#include "salsa/metrics.hpp"

#include <cmath>
#include <limits>

namespace salsa {

double isnr(const ImageBuffer& x_true, const ImageBuffer& y, const ImageBuffer& x_hat) {
  require_same_shape(x_true.shape(), y.shape(), "isnr");
  require_same_shape(x_true.shape(), x_hat.shape(), "isnr");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    const double e_obs = y.data()[i] - x_true.data()[i];
    const double e_hat = x_hat.data()[i] - x_true.data()[i];
    num += e_obs * e_obs;
    den += e_hat * e_hat;
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

}  // namespace salsa
