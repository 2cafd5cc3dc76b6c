#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "bata/core/grid.hpp"

namespace bata {

using cplx = std::complex<double>;

/// Complex n1 x n2 field, row-major like Grid2. Used for Fourier coefficients.
struct ComplexField {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cplx> values;

  ComplexField() = default;
  explicit ComplexField(Shape s, cplx fill = 0.0) : rows(s.rows), cols(s.cols), values(s.pixels(), fill) {}

  Shape shape() const { return {rows, cols}; }
  std::size_t size() const { return values.size(); }
  cplx& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  cplx operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  /// Real inner product Re<a, b> on C^n viewed as R^2n.
  double dot(const ComplexField& o) const {
    require(shape() == o.shape(), ErrorCode::dimension_mismatch, "ComplexField dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += (std::conj(values[i]) * o.values[i]).real();
    return acc;
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

namespace detail {

// FFTW planning is not thread safe; execution with new arrays is.
class FftPlanCache {
 public:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
      std::lock_guard lock(mutex());
      if (forward) fftw_destroy_plan(forward);
      if (backward) fftw_destroy_plan(backward);
    }
  };

  static std::shared_ptr<const Plans> get(Shape s) {
    std::lock_guard lock(mutex());
    auto& cache = table();
    auto key = std::make_pair(s.rows, s.cols);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    auto plans = std::make_shared<Plans>();
    std::vector<cplx> scratch(s.pixels());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft_2d(static_cast<int>(s.rows), static_cast<int>(s.cols), buf, buf,
                                      FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_2d(static_cast<int>(s.rows), static_cast<int>(s.cols), buf, buf,
                                       FFTW_BACKWARD, flags);
    cache.emplace(key, plans);
    return plans;
  }

  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }

 private:
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Plans>>& table() {
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const Plans>> t;
    return t;
  }
};

}  // namespace detail

/// Unitary 2-D discrete Fourier transform (|Fx| = |x|), zero frequency at index (0, 0).
class Fft2 {
 public:
  explicit Fft2(Shape s) : shape_(s), plans_(detail::FftPlanCache::get(s)) {
    require(s.rows > 0 && s.cols > 0, ErrorCode::invalid_argument, "Fft2 needs positive dims");
  }

  Shape shape() const { return shape_; }

  ComplexField forward(const Grid2& x) const {
    check(x.shape());
    ComplexField z(shape_);
    for (std::size_t i = 0; i < x.values.size(); ++i) z.values[i] = x.values[i];
    transform(z, plans_->forward);
    return z;
  }

  ComplexField forward(ComplexField z) const {
    check(z.shape());
    transform(z, plans_->forward);
    return z;
  }

  /// F* = F^{-1}.
  ComplexField inverse(ComplexField z) const {
    check(z.shape());
    transform(z, plans_->backward);
    return z;
  }

  /// Real part of F* z. Callers pass Hermitian-symmetric spectra, so the discarded
  /// imaginary part is round-off.
  Grid2 inverse_real(ComplexField z) const {
    z = inverse(std::move(z));
    Grid2 x(shape_);
    for (std::size_t i = 0; i < x.values.size(); ++i) x.values[i] = z.values[i].real();
    return x;
  }

  /// Adjoint of x -> F x when the real image space is paired with C^n as R^2n.
  Grid2 adjoint(const ComplexField& z) const { return inverse_real(z); }

 private:
  void check(Shape s) const {
    require(s == shape_, ErrorCode::dimension_mismatch,
            "Fft2: expected " + bata::to_string(shape_) + ", got " + bata::to_string(s));
  }

  void transform(ComplexField& z, fftw_plan plan) const {
    auto* buf = reinterpret_cast<fftw_complex*>(z.values.data());
    fftw_execute_dft(plan, buf, buf);
    const double scale = 1.0 / std::sqrt(static_cast<double>(shape_.pixels()));
    for (auto& v : z.values) v *= scale;
  }

  Shape shape_;
  std::shared_ptr<const detail::FftPlanCache::Plans> plans_;
};

}  // namespace bata
