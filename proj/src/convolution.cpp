#include "salsa/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fft.hpp"

namespace salsa {

std::string_view to_string(BlurKind kind) {
  switch (kind) {
    case BlurKind::Uniform9:
      return "uniform9";
    case BlurKind::GaussianExp2:
      return "gaussian";
    case BlurKind::InverseQuadratic:
      return "invquad";
  }
  return "unknown";
}

BlurKind parse_blur_kind(std::string_view name) {
  if (name == "uniform9" || name == "uniform") return BlurKind::Uniform9;
  if (name == "gaussian") return BlurKind::GaussianExp2;
  if (name == "invquad") return BlurKind::InverseQuadratic;
  throw std::invalid_argument("unknown blur kind '" + std::string(name) + "'");
}

Psf Psf::from_taps(std::size_t support_height, std::size_t support_width, std::vector<double> taps) {
  if (support_height == 0 || support_width == 0 || support_height % 2 == 0 || support_width % 2 == 0) {
    throw std::invalid_argument("PSF support must be odd and positive, got " +
                                std::to_string(support_height) + "x" + std::to_string(support_width));
  }
  if (taps.size() != support_height * support_width) {
    throw std::invalid_argument("PSF tap count does not match its support");
  }
  if (!std::all_of(taps.begin(), taps.end(), [](double v) { return std::isfinite(v); })) {
    throw std::invalid_argument("PSF taps must be finite");
  }
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  if (!(std::abs(sum) > 0.0)) throw std::invalid_argument("PSF taps sum to zero");
  for (double& t : taps) t /= sum;
  return Psf(support_height, support_width, std::move(taps));
}

double Psf::at_offset(long di, long dj) const {
  const long r = di + static_cast<long>(center_row());
  const long c = dj + static_cast<long>(center_col());
  if (r < 0 || c < 0 || r >= static_cast<long>(height_) || c >= static_cast<long>(width_)) return 0.0;
  return tap(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
}

Psf build_psf(BlurKind kind, const PsfParams& params) {
  int size = 0;
  switch (kind) {
    case BlurKind::Uniform9:
      size = params.size.value_or(kDefaultUniformSize);
      break;
    case BlurKind::GaussianExp2:
      size = params.size.value_or(kDefaultGaussianSize);
      break;
    case BlurKind::InverseQuadratic:
      size = params.size.value_or(kDefaultInverseQuadraticSize);
      break;
  }
  if (size < 1 || size % 2 == 0) {
    throw std::invalid_argument("PSF size must be odd and >= 1, got " + std::to_string(size));
  }
  const double s = params.gaussian_std.value_or(kDefaultGaussianStd);
  if (kind == BlurKind::GaussianExp2 && !(s > 0.0)) {
    throw std::invalid_argument("Gaussian PSF standard deviation must be positive");
  }

  const int half = size / 2;
  std::vector<double> taps;
  taps.reserve(static_cast<std::size_t>(size) * size);
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      const double r2 = static_cast<double>(i * i + j * j);
      switch (kind) {
        case BlurKind::Uniform9:
          taps.push_back(1.0);
          break;
        case BlurKind::GaussianExp2:
          taps.push_back(std::exp(-r2 / (2.0 * s * s)));
          break;
        case BlurKind::InverseQuadratic:
          taps.push_back(1.0 / (1.0 + r2));
          break;
      }
    }
  }
  return Psf::from_taps(static_cast<std::size_t>(size), static_cast<std::size_t>(size), std::move(taps));
}

namespace {

bool is_hermitian(const Shape& shape, const std::vector<std::complex<double>>& v) {
  double scale = 0.0;
  for (const auto& z : v) scale = std::max(scale, std::abs(z));
  const double tol = 1e-12 * std::max(scale, 1.0);
  const std::size_t h = shape.height, w = shape.width;
  for (std::size_t r = 0; r < h; ++r) {
    const std::size_t rr = (h - r) % h;
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t cc = (w - c) % w;
      if (std::abs(v[r * w + c] - std::conj(v[rr * w + cc])) > tol) return false;
    }
  }
  return true;
}

ImageBuffer filter_image(const FreqFilter& filter, const ImageBuffer& image, bool conjugate, const char* what) {
  require_same_shape(filter.shape(), image.shape(), what);
  const Shape& shape = image.shape();
  const std::size_t n = shape.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& gains = filter.values();
  ImageBuffer out(shape);

  if (filter.hermitian()) {
    const std::size_t half_w = shape.width / 2 + 1;
    auto real = detail::alloc_real(n);
    auto spec = detail::alloc_complex(detail::half_spectrum_size(shape));
    std::copy(image.data().begin(), image.data().end(), real.get());
    detail::forward_r2c(shape, real.get(), spec.get());
    for (std::size_t r = 0; r < shape.height; ++r) {
      for (std::size_t c = 0; c < half_w; ++c) {
        const auto g = gains[r * shape.width + c];
        spec[r * half_w + c] *= conjugate ? std::conj(g) : g;
      }
    }
    detail::inverse_c2r(shape, spec.get(), real.get());
    auto dst = out.values();
    for (std::size_t i = 0; i < n; ++i) dst[i] = real[i] * inv_n;
    return out;
  }

  auto a = detail::alloc_complex(n);
  auto b = detail::alloc_complex(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = image.data()[i];
  detail::forward_c2c(shape, a.get(), b.get());
  for (std::size_t i = 0; i < n; ++i) b[i] *= conjugate ? std::conj(gains[i]) : gains[i];
  detail::inverse_c2c(shape, b.get(), a.get());
  auto dst = out.values();
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i].real() * inv_n;
  return out;
}

}  // namespace

FreqFilter::FreqFilter(Shape shape, std::vector<std::complex<double>> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape.height == 0 || shape.width == 0) throw std::invalid_argument("filter dimensions must be positive");
  if (values_.size() != shape.size()) throw std::invalid_argument("filter value count does not match its shape");
  for (const auto& z : values_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("filter values must be finite");
    }
  }
  hermitian_ = is_hermitian(shape_, values_);
}

double FreqFilter::max_squared_gain() const {
  double m = 0.0;
  for (const auto& z : values_) m = std::max(m, std::norm(z));
  return m;
}

FreqFilter psf_to_otf(const Psf& psf, Shape shape) {
  if (psf.support_height() > shape.height || psf.support_width() > shape.width) {
    throw std::invalid_argument("PSF support exceeds the image shape " + to_string(shape));
  }
  const std::size_t h = shape.height, w = shape.width;
  auto real = detail::alloc_real(shape.size());
  std::fill(real.get(), real.get() + shape.size(), 0.0);
  const long ch = static_cast<long>(psf.center_row());
  const long cw = static_cast<long>(psf.center_col());
  for (std::size_t a = 0; a < psf.support_height(); ++a) {
    const std::size_t r = static_cast<std::size_t>((static_cast<long>(a) - ch + static_cast<long>(h)) % static_cast<long>(h));
    for (std::size_t b = 0; b < psf.support_width(); ++b) {
      const std::size_t c = static_cast<std::size_t>((static_cast<long>(b) - cw + static_cast<long>(w)) % static_cast<long>(w));
      real[r * w + c] += psf.tap(a, b);
    }
  }

  const std::size_t half_w = w / 2 + 1;
  auto spec = detail::alloc_complex(detail::half_spectrum_size(shape));
  detail::forward_r2c(shape, real.get(), spec.get());

  // Expand the half spectrum using X(-k) = conj(X(k)) for real input.
  std::vector<std::complex<double>> full(shape.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c < half_w) {
        full[r * w + c] = spec[r * half_w + c];
      } else {
        const std::size_t rr = (h - r) % h;
        full[r * w + c] = std::conj(spec[rr * half_w + (w - c)]);
      }
    }
  }
  return FreqFilter(shape, std::move(full));
}

ImageBuffer apply_filter(const FreqFilter& filter, const ImageBuffer& image) {
  return filter_image(filter, image, false, "apply_filter");
}

ImageBuffer adjoint_filter(const FreqFilter& filter, const ImageBuffer& image) {
  return filter_image(filter, image, true, "adjoint_filter");
}

FreqFilter build_inversion_filter(const FreqFilter& otf, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("inversion filter requires mu > 0, got " + std::to_string(mu));
  }
  std::vector<std::complex<double>> gains(otf.values().size());
  for (std::size_t i = 0; i < gains.size(); ++i) {
    const double p = std::norm(otf.values()[i]);
    gains[i] = p / (p + mu);
  }
  return FreqFilter(otf.shape(), std::move(gains));
}

FreqFilter gram_filter(const FreqFilter& otf) {
  std::vector<std::complex<double>> gains(otf.values().size());
  for (std::size_t i = 0; i < gains.size(); ++i) gains[i] = std::norm(otf.values()[i]);
  return FreqFilter(otf.shape(), std::move(gains));
}

}  // namespace salsa
