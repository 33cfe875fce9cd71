#include "salsa/image.hpp"

#include <algorithm>
#include <cmath>

namespace salsa {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.height) + "x" + std::to_string(shape.width);
}

ImageBuffer::ImageBuffer(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {
  if (shape.height == 0 || shape.width == 0) {
    throw std::invalid_argument("image dimensions must be positive, got " + to_string(shape));
  }
}

ImageBuffer::ImageBuffer(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (shape.height == 0 || shape.width == 0) {
    throw std::invalid_argument("image dimensions must be positive, got " + to_string(shape));
  }
  if (data_.size() != shape.size()) {
    throw std::invalid_argument("image data length " + std::to_string(data_.size()) +
                                " does not match shape " + to_string(shape));
  }
}

bool ImageBuffer::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" + to_string(a) + " vs " +
                                to_string(b) + ")");
  }
}

}  // namespace salsa
