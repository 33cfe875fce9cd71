#pragma once

// Thin RAII layer over FFTW. Plans are cached per shape behind a mutex (the
// FFTW planner is not reentrant); execution uses the new-array interface on
// per-call buffers, so concurrent transforms are safe.

#include <complex>
#include <cstddef>
#include <memory>

#include "salsa/image.hpp"

namespace salsa::detail {

struct FftwFree {
  void operator()(void* p) const;
};

template <class T>
using FftwArray = std::unique_ptr<T[], FftwFree>;

FftwArray<double> alloc_real(std::size_t n);
FftwArray<std::complex<double>> alloc_complex(std::size_t n);

/// Number of complex bins in a real-to-complex half spectrum.
inline std::size_t half_spectrum_size(const Shape& s) { return s.height * (s.width / 2 + 1); }

// All transforms are unnormalized; callers divide by n after an inverse.
void forward_r2c(const Shape& shape, double* in, std::complex<double>* out);
void inverse_c2r(const Shape& shape, std::complex<double>* in, double* out);  // destroys `in`
void forward_c2c(const Shape& shape, std::complex<double>* in, std::complex<double>* out);
void inverse_c2c(const Shape& shape, std::complex<double>* in, std::complex<double>* out);

}  // namespace salsa::detail
