#pragma once

#include <optional>

#include "bata/core/grid.hpp"

namespace bata {

enum class SchemeKind { identity, jacobi, gauss_seidel, none, block_gs };

inline const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::identity: return "identity";
    case SchemeKind::jacobi: return "jacobi";
    case SchemeKind::gauss_seidel: return "gauss_seidel";
    case SchemeKind::none: return "none";
    case SchemeKind::block_gs: return "block_gs";
  }
  return "unknown";
}

/// A splitting A = N + M; one step solves N p+ = b - M p.
///
/// identity:  N = diag(theta_x^{-1} I, theta_y^{-1} I) on the primal/dual blocks
///            (a single theta on unstructured systems).
/// block_gs:  N = [[N11, 0], [A21, N22]]. On PDPS adjoint systems
///            N11 = F* max(theta_x^{-1}, hess multiplier) F and N22 = hess_y + theta_y^{-1} I;
///            on dense systems the diagonal blocks are shifted by n11_shift / n22_shift.
/// none:      N = A, solved by a Krylov method on structured systems.
struct SplittingScheme {
  SchemeKind kind = SchemeKind::none;
  double theta_x = 1.0;
  double theta_y = 1.0;
  std::optional<Grid2> theta_x_inv_field;
  std::size_t block_split = 0;
  double n11_shift = 0.0;
  double n22_shift = 0.0;
  double krylov_tolerance = 1e-4;
  int krylov_max_iterations = 2000;
  std::optional<double> contraction_estimate;

  static SplittingScheme identity(double theta) { return identity(theta, theta); }
  static SplittingScheme identity(double theta_x, double theta_y) {
    require(theta_x > 0 && theta_y > 0, ErrorCode::invalid_argument, "identity splitting: theta must be positive");
    SplittingScheme s;
    s.kind = SchemeKind::identity;
    s.theta_x = theta_x;
    s.theta_y = theta_y;
    return s;
  }
  static SplittingScheme jacobi() {
    SplittingScheme s;
    s.kind = SchemeKind::jacobi;
    return s;
  }
  static SplittingScheme gauss_seidel() {
    SplittingScheme s;
    s.kind = SchemeKind::gauss_seidel;
    return s;
  }
  static SplittingScheme none(double tolerance = 1e-4, int max_iterations = 2000) {
    SplittingScheme s;
    s.kind = SchemeKind::none;
    s.krylov_tolerance = tolerance;
    s.krylov_max_iterations = max_iterations;
    return s;
  }
  static SplittingScheme block_gs(Grid2 theta_x_inv, double theta_y) {
    require(theta_y > 0, ErrorCode::invalid_argument, "block_gs: theta_y must be positive");
    SplittingScheme s;
    s.kind = SchemeKind::block_gs;
    s.theta_x_inv_field = std::move(theta_x_inv);
    s.theta_y = theta_y;
    return s;
  }
  static SplittingScheme dense_block_gs(std::size_t split, double n11_shift = 0.0, double n22_shift = 0.0) {
    SplittingScheme s;
    s.kind = SchemeKind::block_gs;
    s.block_split = split;
    s.n11_shift = n11_shift;
    s.n22_shift = n22_shift;
    return s;
  }
};

/// Estimates from check_split_condition.
struct SplitReport {
  double zeta_est = 0.0;     // |N^{-1} M|
  double gamma_n_est = 0.0;  // gamma_N with gamma_N |N^{-1}| <= 1
  bool admissible = false;   // zeta_est < 1
  bool inconclusive = false; // a power iteration did not settle within its budget
};

/// Power-iteration settings for operator-norm estimates.
struct NormEstimateOptions {
  int max_iterations = 100;
  double relative_tolerance = 1e-6;
  std::uint64_t seed = 7;
  /// Dense matrices up to this size get an exact SVD instead of power iteration.
  long exact_up_to = 1500;
};

}  // namespace bata
