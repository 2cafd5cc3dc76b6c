#pragma once

#include <memory>
#include <numbers>

#include "bata/adjoint/dense.hpp"
#include "bata/adjoint/krylov.hpp"
#include "bata/adjoint/scheme.hpp"
#include "bata/linops/fft2.hpp"
#include "bata/linops/operator.hpp"
#include "bata/prox/smoothed_tv.hpp"

namespace bata {

/// p in L(U; A) for one training example: one U-sized row per alpha component.
/// Row j is the sensitivity of the inner solution to alpha_j.
struct AdjointMatrix {
  std::vector<PrimalDualState> rows;

  AdjointMatrix() = default;
  AdjointMatrix(std::size_t components, Shape s) : rows(components, PrimalDualState(s)) {}
  std::size_t components() const { return rows.size(); }
};

/// theta_x^{-1}(i, j) = 0.1 + 0.4 (1 - sin(i pi / n1) sin(j pi / n2))^2 on a spectrum
/// laid out with zero frequency at the centre (i = n1/2, j = n2/2), where it is 0.1;
/// it rises to 0.5 towards the highest frequencies on the border.
inline Grid2 theta_x_field(std::size_t n1, std::size_t n2) {
  require(n1 > 0 && n2 > 0, ErrorCode::invalid_argument, "theta_x_field needs positive dims");
  Grid2 t(n1, n2);
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c) {
      const double s = std::sin(static_cast<double>(r) * std::numbers::pi / static_cast<double>(n1)) *
                       std::sin(static_cast<double>(c) * std::numbers::pi / static_cast<double>(n2));
      t(r, c) = 0.1 + 0.4 * (1.0 - s) * (1.0 - s);
    }
  return t;
}

/// Moves a centred spectrum to the FFT's native layout (zero frequency at (0, 0)),
/// averaging each frequency with its mirror -k so that the resulting Fourier
/// multiplier maps real images to real images. For even sizes the average is exact.
inline Grid2 centered_to_fft_layout(const Grid2& centred) {
  const std::size_t n1 = centred.rows, n2 = centred.cols;
  Grid2 native(centred.shape());
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c) native(r, c) = centred((r + n1 / 2) % n1, (c + n2 / 2) % n2);
  Grid2 sym(native.shape());
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c)
      sym(r, c) = 0.5 * (native(r, c) + native((n1 - r) % n1, (n2 - c) % n2));
  return sym;
}

/// The linearised PDPS optimality system for one training example,
///   A s = [[hess_x f, K*], [-K, hess_y g*]] s = -rhs_j,
/// where hess_x f = F* diag(hess_x_multiplier) F and rhs_j = (d_j grad_x f, d_j grad_y g*).
struct PdpsAdjointSystem {
  std::shared_ptr<const Fft2> fft;
  std::vector<double> hess_x_multiplier;
  PixelBlocks hess_y;
  GradientOperator K;
  std::vector<PrimalDualState> rhs;

  Shape shape() const { return fft->shape(); }
  std::size_t components() const { return rhs.size(); }
  std::size_t dimension() const { return 3 * shape().pixels(); }

  void validate() const {
    require(fft != nullptr, ErrorCode::missing_callback, "adjoint system: FFT missing");
    require(static_cast<bool>(K), ErrorCode::missing_callback, "adjoint system: K missing");
    require(hess_x_multiplier.size() == shape().pixels() && hess_y.size() == shape().pixels(),
            ErrorCode::dimension_mismatch, "adjoint system: Hessian sizes");
    for (const auto& r : rhs)
      require(r.shape() == shape(), ErrorCode::dimension_mismatch, "adjoint system: rhs shape");
  }

  Grid2 fourier_multiply(const Grid2& x, const std::vector<double>& m) const {
    ComplexField z = fft->forward(x);
    for (std::size_t i = 0; i < z.values.size(); ++i) z.values[i] *= m[i];
    return fft->inverse_real(std::move(z));
  }

  Grid2 apply_hess_xx(const Grid2& v) const { return fourier_multiply(v, hess_x_multiplier); }
  DualField apply_hess_yy(const DualField& v) const { return apply_blocks(hess_y, v); }

  PrimalDualState apply(const PrimalDualState& s) const {
    Grid2 x = apply_hess_xx(s.x);
    x += K.adjoint(s.y);
    DualField y = apply_hess_yy(s.y);
    y -= K(s.x);
    return PrimalDualState(std::move(x), std::move(y));
  }

  /// b_j = -rhs_j.
  PrimalDualState target(std::size_t j) const { return -1.0 * rhs.at(j); }

  /// A s - b_j.
  PrimalDualState residual(std::size_t j, const PrimalDualState& s) const { return apply(s) + rhs.at(j); }
};

namespace detail {

inline std::vector<double> n11_multiplier(const PdpsAdjointSystem& sys, const Grid2& theta_x_inv) {
  require(theta_x_inv.shape() == sys.shape(), ErrorCode::dimension_mismatch, "block_gs: theta_x field shape");
  std::vector<double> n(sys.hess_x_multiplier.size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::max(theta_x_inv.values[i], sys.hess_x_multiplier[i]);
  return n;
}

inline DualField solve_n22(const PixelBlocks& hess_y, double theta_y_inv, const DualField& rhs) {
  DualField out(rhs.shape());
  for (std::size_t j = 0; j < hess_y.size(); ++j) {
    const Sym2& h = hess_y[j];
    const double a = h.xx + theta_y_inv, b = h.xy, d = h.yy + theta_y_inv;
    const double det = a * d - b * b;
    require(det > 0.0 && std::isfinite(det), ErrorCode::singular_system,
            "block_gs: singular 2x2 block at pixel " + std::to_string(j));
    const double u = rhs.at(j, 0), v = rhs.at(j, 1);
    out.at(j, 0) = (d * u - b * v) / det;
    out.at(j, 1) = (a * v - b * u) / det;
  }
  return out;
}

}  // namespace detail

/// Block Gauss-Seidel step with N11 = F* max(theta_x^{-1}, hess multiplier) F (the
/// field given in FFT layout, see centered_to_fft_layout) and
/// N22 = hess_y g* + theta_y^{-1} I:
///   p_x+ = N11^{-1}(-M11 p_x + b_x - K* p_y),
///   p_y+ = N22^{-1}(theta_y^{-1} p_y + b_y + K p_x+).
/// The +K coupling follows from the (2,1) block -K of A moving to the right-hand side.
inline AdjointMatrix block_gs_step(const AdjointMatrix& p, const PdpsAdjointSystem& sys,
                                   const Grid2& theta_x_inv, double theta_y) {
  sys.validate();
  require(p.components() == sys.components(), ErrorCode::dimension_mismatch,
          "block_gs_step: adjoint rows do not match the system");
  require(theta_y > 0, ErrorCode::invalid_argument, "block_gs_step: theta_y must be positive");
  const std::vector<double> n11 = detail::n11_multiplier(sys, theta_x_inv);
  const double theta_y_inv = 1.0 / theta_y;
  AdjointMatrix out;
  out.rows.reserve(p.components());
  for (std::size_t j = 0; j < p.components(); ++j) {
    const PrimalDualState& row = p.rows[j];
    // F p_x+ = (1 - h/n11) F p_x + F(b_x - K* p_y) / n11
    ComplexField fx = sys.fft->forward(row.x);
    Grid2 forcing = sys.K.adjoint(row.y);
    forcing += sys.rhs[j].x;
    ComplexField ff = sys.fft->forward(forcing);
    for (std::size_t i = 0; i < fx.values.size(); ++i)
      fx.values[i] = (1.0 - sys.hess_x_multiplier[i] / n11[i]) * fx.values[i] - ff.values[i] / n11[i];
    Grid2 x_next = sys.fft->inverse_real(std::move(fx));

    DualField dual_rhs = sys.K(x_next);
    dual_rhs -= sys.rhs[j].y;
    axpy(theta_y_inv, row.y.values, dual_rhs.values);
    DualField y_next = detail::solve_n22(sys.hess_y, theta_y_inv, dual_rhs);
    out.rows.emplace_back(std::move(x_next), std::move(y_next));
  }
  return out;
}

/// Identity splitting: p+ = p - diag(theta_x, theta_y)(A p - b).
inline AdjointMatrix identity_step(const AdjointMatrix& p, const PdpsAdjointSystem& sys, double theta_x,
                                   double theta_y) {
  sys.validate();
  require(p.components() == sys.components(), ErrorCode::dimension_mismatch,
          "identity_step: adjoint rows do not match the system");
  AdjointMatrix out;
  out.rows.reserve(p.components());
  for (std::size_t j = 0; j < p.components(); ++j) {
    const PrimalDualState r = sys.residual(j, p.rows[j]);
    PrimalDualState next = p.rows[j];
    axpy(-theta_x, r.x.values, next.x.values);
    axpy(-theta_y, r.y.values, next.y.values);
    out.rows.push_back(std::move(next));
  }
  return out;
}

/// Row-wise GMRES solve of A p_j = b_j warm-started from p (unpreconditioned).
inline AdjointMatrix krylov_solve(const AdjointMatrix& p, const PdpsAdjointSystem& sys, double tolerance,
                                  int max_iterations, KrylovResult* worst = nullptr) {
  sys.validate();
  require(p.components() == sys.components(), ErrorCode::dimension_mismatch,
          "krylov_solve: adjoint rows do not match the system");
  const std::function<PrimalDualState(const PrimalDualState&)> op = [&](const PrimalDualState& s) {
    return sys.apply(s);
  };
  AdjointMatrix out = p;
  KrylovResult agg;
  agg.converged = true;
  for (std::size_t j = 0; j < p.components(); ++j) {
    const KrylovResult r = gmres<PrimalDualState>(op, sys.target(j), out.rows[j], tolerance, max_iterations);
    agg.iterations = std::max(agg.iterations, r.iterations);
    agg.relative_residual = std::max(agg.relative_residual, r.relative_residual);
    agg.converged = agg.converged && r.converged;
  }
  if (worst) *worst = agg;
  return out;
}

/// Dense assembly of A (column j = A e_j on the flattened (x, y) ordering).
inline dense::Matrix to_dense(const PdpsAdjointSystem& sys) {
  const std::size_t n = sys.dimension();
  require(n <= 10000, ErrorCode::invalid_argument, "to_dense: system too large for dense assembly");
  dense::Matrix A(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const auto col = sys.apply(PrimalDualState::unflatten(sys.shape(), e)).flatten();
    for (std::size_t i = 0; i < n; ++i) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  return A;
}

/// Rows b_j = -rhs_j as a dense matrix.
inline dense::Matrix dense_targets(const PdpsAdjointSystem& sys) {
  dense::Matrix B(static_cast<Eigen::Index>(sys.components()), static_cast<Eigen::Index>(sys.dimension()));
  for (std::size_t j = 0; j < sys.components(); ++j) {
    const auto t = sys.target(j).flatten();
    for (std::size_t i = 0; i < t.size(); ++i)
      B(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = t[i];
  }
  return B;
}

inline dense::Matrix to_dense(const AdjointMatrix& p) {
  require(!p.rows.empty(), ErrorCode::invalid_argument, "to_dense: empty adjoint");
  const auto n = static_cast<Eigen::Index>(p.rows.front().size());
  dense::Matrix P(static_cast<Eigen::Index>(p.components()), n);
  for (std::size_t j = 0; j < p.components(); ++j) {
    const auto f = p.rows[j].flatten();
    for (Eigen::Index i = 0; i < n; ++i) P(static_cast<Eigen::Index>(j), i) = f[static_cast<std::size_t>(i)];
  }
  return P;
}

inline AdjointMatrix from_dense(const dense::Matrix& P, Shape s) {
  AdjointMatrix p;
  for (Eigen::Index j = 0; j < P.rows(); ++j) {
    const dense::Vector rv = P.row(j).transpose();
    const std::vector<double> row(rv.data(), rv.data() + rv.size());
    p.rows.push_back(PrimalDualState::unflatten(s, row));
  }
  return p;
}

/// The splitting N, M of a structured system as dense matrices (desk scale only).
inline dense::Split structured_split(const PdpsAdjointSystem& sys, const SplittingScheme& s) {
  const dense::Matrix A = to_dense(sys);
  const auto N = static_cast<Eigen::Index>(sys.shape().pixels());
  const auto n = A.rows();
  if (s.kind == SchemeKind::identity) {
    dense::Matrix Nm = dense::Matrix::Zero(n, n);
    Nm.topLeftCorner(N, N).diagonal().setConstant(1.0 / s.theta_x);
    Nm.bottomRightCorner(n - N, n - N).diagonal().setConstant(1.0 / s.theta_y);
    return {Nm, A - Nm};
  }
  if (s.kind == SchemeKind::block_gs && s.theta_x_inv_field) {
    PdpsAdjointSystem n11_sys = sys;
    n11_sys.hess_x_multiplier = detail::n11_multiplier(sys, *s.theta_x_inv_field);
    dense::Matrix Nm = dense::Matrix::Zero(n, n);
    const dense::Matrix An11 = to_dense(n11_sys);
    Nm.topLeftCorner(N, N) = An11.topLeftCorner(N, N);
    Nm.bottomLeftCorner(n - N, N) = A.bottomLeftCorner(n - N, N);
    Nm.bottomRightCorner(n - N, n - N) = A.bottomRightCorner(n - N, n - N);
    Nm.bottomRightCorner(n - N, n - N).diagonal().array() += 1.0 / s.theta_y;
    return {Nm, A - Nm};
  }
  SplittingScheme dense_scheme = s;
  if (s.kind == SchemeKind::block_gs) dense_scheme.block_split = static_cast<std::size_t>(N);
  return dense::split(A, dense_scheme);
}

/// One splitting step for every row: N p+ = b - M p.
inline AdjointMatrix splitting_step(const AdjointMatrix& p, const PdpsAdjointSystem& sys, const SplittingScheme& s) {
  switch (s.kind) {
    case SchemeKind::identity:
      return identity_step(p, sys, s.theta_x, s.theta_y);
    case SchemeKind::block_gs:
      require(s.theta_x_inv_field.has_value(), ErrorCode::invalid_argument,
              "block_gs on a PDPS system needs the theta_x field");
      return block_gs_step(p, sys, *s.theta_x_inv_field, s.theta_y);
    case SchemeKind::none:
      return krylov_solve(p, sys, s.krylov_tolerance, s.krylov_max_iterations);
    case SchemeKind::jacobi:
    case SchemeKind::gauss_seidel: {
      // Entry-wise schemes need the explicit matrix.
      const dense::Matrix A = to_dense(sys);
      return from_dense(dense::splitting_step(to_dense(p), A, dense_targets(sys), s), sys.shape());
    }
  }
  return p;
}

inline SplitReport check_split_condition(const PdpsAdjointSystem& sys, const SplittingScheme& s,
                                         const NormEstimateOptions& opt = {}) {
  const dense::Split sp = structured_split(sys, s);
  const dense::Matrix Ninv = sp.N.partialPivLu().inverse();
  require(Ninv.allFinite(), ErrorCode::singular_system, "check_split_condition: N is singular");
  const auto zeta = dense::norm2(dense::Matrix(Ninv * sp.M), opt);
  const auto ninv = dense::norm2(Ninv, opt);
  SplitReport rep;
  rep.zeta_est = zeta.value;
  rep.gamma_n_est = ninv.value > 0 ? 1.0 / ninv.value : 0.0;
  rep.inconclusive = !zeta.converged || !ninv.converged;
  rep.admissible = rep.zeta_est < 1.0;
  return rep;
}

}  // namespace bata
