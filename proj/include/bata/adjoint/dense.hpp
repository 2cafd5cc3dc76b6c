#pragma once

#include <Eigen/Dense>
#include <random>

#include "bata/adjoint/scheme.hpp"

namespace bata {

namespace dense {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
};

/// |B|_2 by power iteration on B^T B, where only products with B and B^T are needed.
template <class Apply, class ApplyT>
NormEstimate power_norm(Eigen::Index n, Apply&& apply, ApplyT&& apply_t, const NormEstimateOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = nd(rng);
  x.normalize();
  double prev = 0.0;
  NormEstimate est;
  for (int k = 0; k < opt.max_iterations; ++k) {
    Vector y = apply_t(apply(x));
    const double lambda = y.norm();
    if (lambda == 0.0) return {0.0, true};
    x = y / lambda;
    est.value = std::sqrt(lambda);
    if (k > 0 && std::abs(lambda - prev) <= opt.relative_tolerance * lambda) {
      est.converged = true;
      break;
    }
    prev = lambda;
  }
  return est;
}

inline NormEstimate power_norm(const Matrix& B, const NormEstimateOptions& opt) {
  return power_norm(
      B.cols(), [&](const Vector& v) -> Vector { return B * v; },
      [&](const Vector& v) -> Vector { return B.transpose() * v; }, opt);
}

/// |B|_2, exact for moderate sizes.
inline NormEstimate norm2(const Matrix& B, const NormEstimateOptions& opt) {
  if (std::max(B.rows(), B.cols()) > opt.exact_up_to) return power_norm(B, opt);
  if (B.size() == 0) return {0.0, true};
  return {Eigen::BDCSVD<Matrix>(B).singularValues()(0), true};
}

struct Split {
  Matrix N;
  Matrix M;
};

inline Split split(const Matrix& A, const SplittingScheme& s) {
  require(A.rows() == A.cols(), ErrorCode::dimension_mismatch, "splitting needs a square matrix");
  const auto n = A.rows();
  Matrix N = Matrix::Zero(n, n);
  switch (s.kind) {
    case SchemeKind::identity:
      N = Matrix::Identity(n, n) / s.theta_x;
      break;
    case SchemeKind::jacobi:
      N.diagonal() = A.diagonal();
      break;
    case SchemeKind::gauss_seidel:
      N = A.triangularView<Eigen::Lower>();
      break;
    case SchemeKind::none:
      N = A;
      break;
    case SchemeKind::block_gs: {
      const auto k = static_cast<Eigen::Index>(s.block_split);
      require(k > 0 && k < n, ErrorCode::invalid_argument, "dense block_gs needs 0 < block_split < n");
      N.topLeftCorner(k, k) = A.topLeftCorner(k, k);
      N.topLeftCorner(k, k).diagonal().array() += s.n11_shift;
      N.bottomLeftCorner(n - k, k) = A.bottomLeftCorner(n - k, k);
      N.bottomRightCorner(n - k, n - k) = A.bottomRightCorner(n - k, n - k);
      N.bottomRightCorner(n - k, n - k).diagonal().array() += s.n22_shift;
      break;
    }
  }
  if (s.kind == SchemeKind::jacobi || s.kind == SchemeKind::gauss_seidel)
    for (Eigen::Index i = 0; i < n; ++i)
      require(N(i, i) != 0.0, ErrorCode::singular_system,
              std::string(to_string(s.kind)) + " splitting: zero on the diagonal at " + std::to_string(i));
  return {N, A - N};
}

/// Solves N x = rhs using the scheme's structure (diagonal / triangular / general).
inline Vector solve_n(const Split& sp, const SplittingScheme& s, const Vector& rhs) {
  switch (s.kind) {
    case SchemeKind::identity:
      return s.theta_x * rhs;
    case SchemeKind::jacobi:
      return rhs.cwiseQuotient(sp.N.diagonal());
    case SchemeKind::gauss_seidel:
      return sp.N.triangularView<Eigen::Lower>().solve(rhs);
    case SchemeKind::none:
    case SchemeKind::block_gs: {
      Eigen::PartialPivLU<Matrix> lu(sp.N);
      const double det = std::abs(lu.determinant());
      require(det > 0.0 && std::isfinite(det), ErrorCode::singular_system, "splitting: N is singular");
      return lu.solve(rhs);
    }
  }
  return rhs;
}

/// One splitting step applied to every row of P (rows are independent unknowns
/// with right-hand sides in the rows of B): N p+ = b - M p.
inline Matrix splitting_step(const Matrix& P, const Matrix& A, const Matrix& B, const SplittingScheme& s) {
  require(P.cols() == A.rows() && B.cols() == A.rows() && P.rows() == B.rows(), ErrorCode::dimension_mismatch,
          "dense splitting_step: shapes of P, A and B disagree");
  const Split sp = split(A, s);
  Matrix out(P.rows(), P.cols());
  if (s.kind == SchemeKind::none || s.kind == SchemeKind::block_gs) {
    Eigen::PartialPivLU<Matrix> lu(sp.N);
    const double det = std::abs(lu.determinant());
    require(det > 0.0 && std::isfinite(det), ErrorCode::singular_system, "splitting: N is singular");
    for (Eigen::Index r = 0; r < P.rows(); ++r)
      out.row(r) = lu.solve(Vector(B.row(r).transpose() - sp.M * P.row(r).transpose())).transpose();
    return out;
  }
  for (Eigen::Index r = 0; r < P.rows(); ++r)
    out.row(r) = solve_n(sp, s, B.row(r).transpose() - sp.M * P.row(r).transpose()).transpose();
  return out;
}

/// Estimates zeta = |N^{-1} M| and gamma_N = 1/|N^{-1}| (for block Gauss-Seidel also
/// capped by the sufficient bound |N11||N22| / (2|N11| + |N22|(1 + |N22^{-1} A21|^2))).
inline SplitReport check_split_condition(const Matrix& A, const SplittingScheme& s,
                                         const NormEstimateOptions& opt = {}) {
  const Split sp = split(A, s);
  Eigen::PartialPivLU<Matrix> lu(sp.N);
  const Matrix Ninv = lu.inverse();
  require(Ninv.allFinite(), ErrorCode::singular_system, "check_split_condition: N is singular");
  SplitReport rep;
  const NormEstimate zeta = norm2(Matrix(Ninv * sp.M), opt);
  const NormEstimate ninv = norm2(Ninv, opt);
  rep.zeta_est = zeta.value;
  rep.gamma_n_est = ninv.value > 0 ? 1.0 / ninv.value : 0.0;
  rep.inconclusive = !zeta.converged || !ninv.converged;
  if (s.kind == SchemeKind::block_gs) {
    const auto n = A.rows();
    const auto k = static_cast<Eigen::Index>(s.block_split);
    const Matrix N11 = sp.N.topLeftCorner(k, k);
    const Matrix N22 = sp.N.bottomRightCorner(n - k, n - k);
    const Matrix A21 = A.bottomLeftCorner(n - k, k);
    const double n11 = norm2(N11, opt).value;
    const double n22 = norm2(N22, opt).value;
    const double c = norm2(Matrix(N22.partialPivLu().solve(A21)), opt).value;
    const double bound = n11 * n22 / (2.0 * n11 + n22 * (1.0 + c * c));
    rep.gamma_n_est = std::min(rep.gamma_n_est, bound);
  }
  rep.admissible = rep.zeta_est < 1.0;
  return rep;
}

}  // namespace dense

}  // namespace bata
