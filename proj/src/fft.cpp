#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <new>
#include <tuple>

namespace salsa::detail {

void FftwFree::operator()(void* p) const { fftw_free(p); }

FftwArray<double> alloc_real(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwArray<double>(p);
}

FftwArray<std::complex<double>> alloc_complex(std::size_t n) {
  auto* p = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwArray<std::complex<double>>(p);
}

namespace {

enum class Kind { R2C, C2R, C2C_Forward, C2C_Inverse };

using PlanKey = std::tuple<std::size_t, std::size_t, Kind>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const Shape& shape, Kind kind) {
    std::lock_guard<std::mutex> lock(mutex_);
    const PlanKey key{shape.height, shape.width, kind};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int h = static_cast<int>(shape.height);
    const int w = static_cast<int>(shape.width);
    // Scratch arrays come from fftw_malloc so the plan's alignment assumptions
    // hold for every buffer later handed to the new-array execute functions.
    auto real = alloc_real(shape.size());
    auto cplx_a = alloc_complex(shape.size());
    auto cplx_b = alloc_complex(shape.size());
    auto* a = reinterpret_cast<fftw_complex*>(cplx_a.get());
    auto* b = reinterpret_cast<fftw_complex*>(cplx_b.get());

    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::R2C:
        plan = fftw_plan_dft_r2c_2d(h, w, real.get(), a, FFTW_ESTIMATE);
        break;
      case Kind::C2R:
        plan = fftw_plan_dft_c2r_2d(h, w, a, real.get(), FFTW_ESTIMATE);
        break;
      case Kind::C2C_Forward:
        plan = fftw_plan_dft_2d(h, w, a, b, FFTW_FORWARD, FFTW_ESTIMATE);
        break;
      case Kind::C2C_Inverse:
        plan = fftw_plan_dft_2d(h, w, a, b, FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan for " + to_string(shape));
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void forward_r2c(const Shape& shape, double* in, std::complex<double>* out) {
  fftw_execute_dft_r2c(plan_cache().get(shape, Kind::R2C), in, reinterpret_cast<fftw_complex*>(out));
}

void inverse_c2r(const Shape& shape, std::complex<double>* in, double* out) {
  fftw_execute_dft_c2r(plan_cache().get(shape, Kind::C2R), reinterpret_cast<fftw_complex*>(in), out);
}

void forward_c2c(const Shape& shape, std::complex<double>* in, std::complex<double>* out) {
  fftw_execute_dft(plan_cache().get(shape, Kind::C2C_Forward), reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

void inverse_c2c(const Shape& shape, std::complex<double>* in, std::complex<double>* out) {
  fftw_execute_dft(plan_cache().get(shape, Kind::C2C_Inverse), reinterpret_cast<fftw_complex*>(in),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace salsa::detail
