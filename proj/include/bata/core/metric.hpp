#pragma once

#include "bata/linops/operator.hpp"

namespace bata {

/// The PDPS preconditioner
///   Q = [[tau_x^{-1} I, -K*], [-K, (omega tau_y)^{-1} I]],
/// kept in structured form. Q is positive semidefinite iff
/// omega tau_x tau_y |K|^2 <= 1, which is checked against K's norm bound.
struct PdpsMetric {
  double tau_x = 1.0;
  double tau_y = 1.0;
  double omega = 1.0;
  GradientOperator K;

  PdpsMetric(double tau_x_, double tau_y_, double omega_, GradientOperator K_)
      : tau_x(tau_x_), tau_y(tau_y_), omega(omega_), K(std::move(K_)) {
    require(tau_x > 0 && tau_y > 0 && omega > 0, ErrorCode::invalid_argument,
            "PdpsMetric: step lengths must be positive");
    require(static_cast<bool>(K), ErrorCode::missing_callback, "PdpsMetric: operator K missing");
    const double slack = 1.0 - omega * tau_x * tau_y * K.norm_bound * K.norm_bound;
    require(slack >= -1e-12, ErrorCode::not_positive_semidefinite,
            "PdpsMetric: omega*tau_x*tau_y*|K|^2 exceeds 1 by " + std::to_string(-slack));
  }
};

/// <Q u, v>.
inline double q_form(const PrimalDualState& u, const PrimalDualState& v, const PdpsMetric& Q) {
  require(u.shape() == v.shape(), ErrorCode::dimension_mismatch, "q_form: states differ in shape");
  const DualField Kxu = Q.K(u.x);
  const DualField Kxv = Q.K(v.x);
  require(Kxu.shape() == u.y.shape(), ErrorCode::dimension_mismatch, "q_form: K does not match state");
  return u.x.dot(v.x) / Q.tau_x + u.y.dot(v.y) / (Q.omega * Q.tau_y) - Kxu.dot(v.y) - Kxv.dot(u.y);
}

/// |u|_Q. Values of the quadratic form in [-1e-10 |u|^2, 0) are round-off and read as zero.
inline double q_norm(const PrimalDualState& u, const PdpsMetric& Q) {
  require(u.x.shape() == u.y.shape(), ErrorCode::dimension_mismatch, "q_norm: x and y grids differ");
  const DualField Kx = Q.K(u.x);
  require(Kx.shape() == u.y.shape(), ErrorCode::dimension_mismatch, "q_norm: K does not match state");
  const double form = u.x.dot(u.x) / Q.tau_x + u.y.dot(u.y) / (Q.omega * Q.tau_y) - 2.0 * Kx.dot(u.y);
  if (form >= 0.0) return std::sqrt(form);
  const double euclid = u.dot(u);
  require(form >= -1e-10 * euclid, ErrorCode::not_positive_semidefinite,
          "q_norm: quadratic form is " + std::to_string(form));
  return 0.0;
}

}  // namespace bata
