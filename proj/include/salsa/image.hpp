#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace salsa {

/// Height and width of a 2-D grid, in pixels.
struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// Real-valued image stored row-major. Intensities are nominally in [0, 255].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(Shape shape, double fill = 0.0);
  ImageBuffer(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t row, std::size_t col) { return data_[row * shape_.width + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * shape_.width + col]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool all_finite() const;

 private:
  Shape shape_;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

/// Throws std::invalid_argument naming `what` when the shapes differ.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace salsa
