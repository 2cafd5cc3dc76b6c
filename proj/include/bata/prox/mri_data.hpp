#pragma once

#include "bata/linops/fft2.hpp"
#include "bata/linops/mask.hpp"

namespace bata {

/// f0(x) = 1/2 |Z (F x - z)|^2 with a line mask Z.
inline double mri_data_value(const Grid2& x, const Fft2& fft, const MaskParams& m, const ComplexField& z) {
  ComplexField r = fft.forward(x);
  double acc = 0.0;
  for (std::size_t row = 0; row < r.rows; ++row) {
    const double t = m.row_weight(row);
    for (std::size_t c = 0; c < r.cols; ++c) acc += t * t * std::norm(r(row, c) - z(row, c));
  }
  return 0.5 * acc;
}

/// prox_{tau f0}(v) = F*((I + tau Z^2)^{-1}(F v + tau Z^2 z)), exact because F is
/// unitary and Z diagonal.
inline Grid2 prox_mri_data(const Grid2& v, double tau, const MaskParams& m, const ComplexField& z,
                           const Fft2& fft) {
  require(tau > 0, ErrorCode::invalid_argument, "prox_mri_data: tau must be positive");
  require(z.shape() == v.shape(), ErrorCode::dimension_mismatch, "prox_mri_data: data shape");
  check_mask(m, v.shape());
  ComplexField s = fft.forward(v);
  for (std::size_t r = 0; r < s.rows; ++r) {
    const double z2 = m.row_weight(r) * m.row_weight(r);
    const double denom = 1.0 + tau * z2;
    for (std::size_t c = 0; c < s.cols; ++c) s(r, c) = (s(r, c) + tau * z2 * z(r, c)) / denom;
  }
  return fft.inverse_real(std::move(s));
}

inline Grid2 prox_mri_data(const Grid2& v, double tau, const MaskParams& m, const ComplexField& z) {
  return prox_mri_data(v, tau, m, z, Fft2(v.shape()));
}

}  // namespace bata
