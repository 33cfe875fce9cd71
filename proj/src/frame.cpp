#include "salsa/frame.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace salsa {

void FrameSpec::validate_for(const Shape& shape) const {
  if (levels < 1) throw std::invalid_argument("frame levels must be >= 1, got " + std::to_string(levels));
  if (levels > 30) throw std::invalid_argument("frame levels too large: " + std::to_string(levels));
  const std::size_t block = std::size_t{1} << levels;
  if (shape.height == 0 || shape.width == 0 || shape.height % block != 0 || shape.width % block != 0) {
    throw std::invalid_argument("image shape " + to_string(shape) + " is not divisible by 2^" +
                                std::to_string(levels) + " = " + std::to_string(block));
  }
}

FrameCoeffs::FrameCoeffs(Shape shape, int levels, double fill) : shape_(shape), levels_(levels) {
  if (levels < 1) throw std::invalid_argument("frame levels must be >= 1");
  data_.assign(subband_count() * shape.size(), fill);
}

std::span<double> FrameCoeffs::subband(std::size_t index) {
  if (index >= subband_count()) throw std::out_of_range("subband index out of range");
  return std::span<double>(data_).subspan(index * shape_.size(), shape_.size());
}

std::span<const double> FrameCoeffs::subband(std::size_t index) const {
  if (index >= subband_count()) throw std::out_of_range("subband index out of range");
  return std::span<const double>(data_).subspan(index * shape_.size(), shape_.size());
}

std::size_t FrameCoeffs::detail_index(int level, Orientation o) const {
  if (level < 1 || level > levels_) throw std::out_of_range("frame level out of range");
  return 3 * static_cast<std::size_t>(level - 1) + static_cast<std::size_t>(o);
}

bool FrameCoeffs::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_layout(const FrameCoeffs& a, const FrameCoeffs& b, const char* what) {
  if (!a.same_layout(b)) {
    throw std::invalid_argument(std::string(what) + ": coefficient layout mismatch (" + to_string(a.shape()) + "/" +
                                std::to_string(a.levels()) + " levels vs " + to_string(b.shape()) + "/" +
                                std::to_string(b.levels()) + " levels)");
  }
}

namespace {

inline std::size_t wrap_forward(std::size_t i, std::size_t step, std::size_t n) {
  const std::size_t j = i + step;
  return j < n ? j : j - n;
}

inline std::size_t wrap_backward(std::size_t i, std::size_t step, std::size_t n) {
  return i >= step ? i - step : i + n - step;
}

}  // namespace

void analysis_into(const ImageBuffer& image, const FrameSpec& spec, FrameCoeffs& out) {
  const Shape shape = image.shape();
  spec.validate_for(shape);
  if (out.shape() != shape || out.levels() != spec.levels) out = FrameCoeffs(shape, spec.levels);

  const std::size_t h = shape.height, w = shape.width, n = shape.size();
  std::vector<double> lo(n), hi(n);

  // The approximation band doubles as the running lowpass image.
  auto approx = out.approximation();
  std::copy(image.data().begin(), image.data().end(), approx.begin());

  for (int level = 1; level <= spec.levels; ++level) {
    const std::size_t s = std::size_t{1} << (level - 1);

    for (std::size_t r = 0; r < h; ++r) {
      const double* row = approx.data() + r * w;
      for (std::size_t c = 0; c < w; ++c) {
        const double a = row[c];
        const double b = row[wrap_forward(c, s, w)];
        lo[r * w + c] = 0.5 * (a + b);
        hi[r * w + c] = 0.5 * (a - b);
      }
    }

    auto hb = out.detail(level, Orientation::Horizontal);
    auto vb = out.detail(level, Orientation::Vertical);
    auto db = out.detail(level, Orientation::Diagonal);
    for (std::size_t r = 0; r < h; ++r) {
      const std::size_t r2 = wrap_forward(r, s, h);
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t i = r * w + c;
        const std::size_t j = r2 * w + c;
        approx[i] = 0.5 * (lo[i] + lo[j]);
        hb[i] = 0.5 * (lo[i] - lo[j]);
        vb[i] = 0.5 * (hi[i] + hi[j]);
        db[i] = 0.5 * (hi[i] - hi[j]);
      }
    }
  }
}

void synthesis_into(const FrameCoeffs& coeffs, const FrameSpec& spec, ImageBuffer& out) {
  const Shape shape = coeffs.shape();
  spec.validate_for(shape);
  if (coeffs.levels() != spec.levels) {
    throw std::invalid_argument("synthesis: coefficients have " + std::to_string(coeffs.levels()) +
                                " levels but the frame has " + std::to_string(spec.levels));
  }
  if (out.shape() != shape) out = ImageBuffer(shape);

  const std::size_t h = shape.height, w = shape.width, n = shape.size();
  std::vector<double> lo(n), hi(n);
  auto cur = out.values();
  const auto approx = coeffs.approximation();
  std::copy(approx.begin(), approx.end(), cur.begin());

  for (int level = spec.levels; level >= 1; --level) {
    const std::size_t s = std::size_t{1} << (level - 1);
    const auto hb = coeffs.detail(level, Orientation::Horizontal);
    const auto vb = coeffs.detail(level, Orientation::Vertical);
    const auto db = coeffs.detail(level, Orientation::Diagonal);

    // Adjoint of the column pass.
    for (std::size_t r = 0; r < h; ++r) {
      const std::size_t r0 = wrap_backward(r, s, h);
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t i = r * w + c;
        const std::size_t j = r0 * w + c;
        lo[i] = 0.5 * (cur[i] + cur[j]) + 0.5 * (hb[i] - hb[j]);
        hi[i] = 0.5 * (vb[i] + vb[j]) + 0.5 * (db[i] - db[j]);
      }
    }
    // Adjoint of the row pass.
    for (std::size_t r = 0; r < h; ++r) {
      const double* lrow = lo.data() + r * w;
      const double* hrow = hi.data() + r * w;
      double* orow = cur.data() + r * w;
      for (std::size_t c = 0; c < w; ++c) {
        const std::size_t c0 = wrap_backward(c, s, w);
        orow[c] = 0.5 * (lrow[c] + lrow[c0]) + 0.5 * (hrow[c] - hrow[c0]);
      }
    }
  }
}

FrameCoeffs analysis(const ImageBuffer& image, const FrameSpec& spec) {
  FrameCoeffs out;
  analysis_into(image, spec, out);
  return out;
}

ImageBuffer synthesis(const FrameCoeffs& coeffs, const FrameSpec& spec) {
  ImageBuffer out;
  synthesis_into(coeffs, spec, out);
  return out;
}

void coeffs_axpy(double a, const FrameCoeffs& x, FrameCoeffs& y) {
  require_same_layout(x, y, "coeffs_axpy");
  const auto xs = x.values();
  auto ys = y.values();
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += a * xs[i];
}

FrameCoeffs coeffs_axpy(double a, const FrameCoeffs& x, const FrameCoeffs& y) {
  FrameCoeffs out = y;
  coeffs_axpy(a, x, out);
  return out;
}

FrameCoeffs coeffs_scale(double a, const FrameCoeffs& x) {
  FrameCoeffs out = x;
  for (double& v : out.values()) v *= a;
  return out;
}

double coeffs_norm1(const FrameCoeffs& x) {
  double s = 0.0;
  for (double v : x.values()) s += std::abs(v);
  return s;
}

double coeffs_norm2(const FrameCoeffs& x) { return std::sqrt(squared_norm(x.values())); }

double coeffs_dot(const FrameCoeffs& x, const FrameCoeffs& y) {
  require_same_layout(x, y, "coeffs_dot");
  return dot(x.values(), y.values());
}

}  // namespace salsa
