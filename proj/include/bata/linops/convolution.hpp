#pragma once

#include <array>
#include <cstdlib>

#include "bata/linops/fft2.hpp"
#include "bata/linops/operator.hpp"

namespace bata {

/// Weights of the three kernel colour groups: centre, edge-adjacent arms and the
/// remaining ring of the 5x5 stencil (the four far corners are always zero).
struct KernelParams {
  double alpha2 = 1.0;  // centre
  double alpha3 = 0.0;  // the four cells next to the centre
  double alpha4 = 0.0;  // the other sixteen non-corner cells

  double group(int j) const {
    switch (j) {
      case 2: return alpha2;
      case 3: return alpha3;
      case 4: return alpha4;
    }
    throw Error(ErrorCode::invalid_argument, "kernel group index must be 2, 3 or 4");
  }
};

namespace kernel_layout {

inline constexpr int kRadius = 2;

/// Colour group (2, 3, 4) of stencil offset (dr, dc), or 0 for the zero corners.
constexpr int group_of(int dr, int dc) {
  const int ar = dr < 0 ? -dr : dr;
  const int ac = dc < 0 ? -dc : dc;
  if (ar == 0 && ac == 0) return 2;
  if (ar + ac == 1) return 3;
  if (ar == kRadius && ac == kRadius) return 0;
  return 4;
}

constexpr int group_size(int j) { return j == 2 ? 1 : j == 3 ? 4 : j == 4 ? 16 : 0; }

}  // namespace kernel_layout

/// 5x5 stencil, index [dr + 2][dc + 2]. A group weight alpha_j is spread evenly
/// over the group's cells, so the stencil sums to alpha2 + alpha3 + alpha4.
inline std::array<std::array<double, 5>, 5> kernel_stencil(const KernelParams& k) {
  std::array<std::array<double, 5>, 5> s{};
  for (int dr = -2; dr <= 2; ++dr)
    for (int dc = -2; dc <= 2; ++dc) {
      const int g = kernel_layout::group_of(dr, dc);
      s[dr + 2][dc + 2] = g == 0 ? 0.0 : k.group(g) / kernel_layout::group_size(g);
    }
  return s;
}

/// Periodic convolution A x = k * x realised as F* diag(zhat) F.
class Convolution {
 public:
  Convolution(Shape shape, const KernelParams& k) : fft_(shape), multiplier_(shape) {
    require(std::isfinite(k.alpha2) && std::isfinite(k.alpha3) && std::isfinite(k.alpha4),
            ErrorCode::invalid_argument, "kernel parameters must be finite");
    const auto stencil = kernel_stencil(k);
    Grid2 embedded(shape);
    const auto n1 = static_cast<long>(shape.rows), n2 = static_cast<long>(shape.cols);
    for (int dr = -2; dr <= 2; ++dr)
      for (int dc = -2; dc <= 2; ++dc) {
        const auto r = static_cast<std::size_t>(((dr % n1) + n1) % n1);
        const auto c = static_cast<std::size_t>(((dc % n2) + n2) % n2);
        embedded(r, c) += stencil[dr + 2][dc + 2];
        young_bound_ += std::abs(stencil[dr + 2][dc + 2]);
      }
    // Convolution theorem for the unitary transform: F(k * x) = sqrt(N) F(k) F(x).
    multiplier_ = fft_.forward(embedded);
    const double root_n = std::sqrt(static_cast<double>(shape.pixels()));
    for (auto& v : multiplier_.values) v *= root_n;
  }

  Shape shape() const { return fft_.shape(); }
  const Fft2& fft() const { return fft_; }
  const ComplexField& multiplier() const { return multiplier_; }

  /// Young's inequality: |A| <= sum of absolute stencil weights.
  double young_bound() const { return young_bound_; }

  Grid2 apply(const Grid2& x) const { return fft_.inverse_real(scaled(fft_.forward(x), false)); }
  Grid2 adjoint(const Grid2& x) const { return fft_.inverse_real(scaled(fft_.forward(x), true)); }

  ImageOperator as_operator() const {
    ImageOperator op;
    auto self = std::make_shared<Convolution>(*this);
    op.apply = [self](const Grid2& x) { return self->apply(x); };
    op.adjoint_apply = [self](const Grid2& x) { return self->adjoint(x); };
    op.norm_bound = young_bound_;
    return op;
  }

 private:
  ComplexField scaled(ComplexField z, bool conjugate) const {
    for (std::size_t i = 0; i < z.values.size(); ++i)
      z.values[i] *= conjugate ? std::conj(multiplier_.values[i]) : multiplier_.values[i];
    return z;
  }

  Fft2 fft_;
  ComplexField multiplier_;
  double young_bound_ = 0.0;
};

inline Convolution conv_build(Shape shape, const KernelParams& k) { return Convolution(shape, k); }

/// dA/d alpha_j: the convolution with the normalised indicator kernel of group j.
inline Convolution conv_param_derivative(Shape shape, int j) {
  require(j >= 2 && j <= 4, ErrorCode::invalid_argument,
          "conv_param_derivative: group index must be 2, 3 or 4, got " + std::to_string(j));
  KernelParams unit{0.0, 0.0, 0.0};
  (j == 2 ? unit.alpha2 : j == 3 ? unit.alpha3 : unit.alpha4) = 1.0;
  return Convolution(shape, unit);
}

}  // namespace bata
