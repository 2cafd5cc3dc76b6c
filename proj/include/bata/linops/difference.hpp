#pragma once

#include "bata/linops/operator.hpp"

namespace bata {

/// Backward differences with zero (Dirichlet) values outside the grid:
/// (Dx)_j = (x[r,c] - x[r,c-1], x[r,c] - x[r-1,c]).
inline DualField diff_apply(const Grid2& x) {
  DualField y(x.shape());
  const std::size_t n1 = x.rows, n2 = x.cols;
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t c = 0; c < n2; ++c) {
      const std::size_t j = r * n2 + c;
      const double v = x.values[j];
      y.values[2 * j] = v - (c > 0 ? x.values[j - 1] : 0.0);
      y.values[2 * j + 1] = v - (r > 0 ? x.values[j - n2] : 0.0);
    }
  }
  return y;
}

/// D* y, a negative divergence.
inline Grid2 diff_adjoint(const DualField& y) {
  Grid2 x(y.shape());
  const std::size_t n1 = y.rows, n2 = y.cols;
  for (std::size_t r = 0; r < n1; ++r) {
    for (std::size_t c = 0; c < n2; ++c) {
      const std::size_t j = r * n2 + c;
      double v = y.values[2 * j] + y.values[2 * j + 1];
      if (c + 1 < n2) v -= y.values[2 * (j + 1)];
      if (r + 1 < n1) v -= y.values[2 * (j + n2) + 1];
      x.values[j] = v;
    }
  }
  return x;
}

/// |D|^2 <= 8 for the 2-D backward difference operator.
inline constexpr double kDiffNormSqBound = 8.0;

inline GradientOperator make_difference_operator() {
  GradientOperator op;
  op.apply = [](const Grid2& x) { return diff_apply(x); };
  op.adjoint_apply = [](const DualField& y) { return diff_adjoint(y); };
  op.norm_bound = std::sqrt(kDiffNormSqBound);
  return op;
}

}  // namespace bata
