#pragma once

#include <functional>
#include <sstream>

#include "bata/core/grid.hpp"
#include "bata/linops/operator.hpp"

namespace bata {

/// Step lengths for PDPS with a forward step on e. Only obtainable through
/// validate_pdps_steps, which enforces tau_x L/2 + tau_x tau_y |K|^2 <= 1.
class PdpsStepParams {
 public:
  double tau_x() const { return tau_x_; }
  double tau_y() const { return tau_y_; }
  double omega() const { return omega_; }
  double lipschitz_e() const { return lipschitz_e_; }
  double k_norm_sq_bound() const { return k_norm_sq_; }
  double slack() const { return 1.0 - condition(tau_x_, tau_y_, lipschitz_e_, k_norm_sq_); }

  static double condition(double tau_x, double tau_y, double L, double k_norm_sq) {
    return tau_x * L / 2.0 + tau_x * tau_y * k_norm_sq;
  }

  /// Re-validate against a new Lipschitz bound for e (which changes with alpha).
  PdpsStepParams with_lipschitz(double L) const;

 private:
  PdpsStepParams(double tx, double ty, double om, double L, double k2)
      : tau_x_(tx), tau_y_(ty), omega_(om), lipschitz_e_(L), k_norm_sq_(k2) {}
  friend PdpsStepParams validate_pdps_steps(double, double, double, double, double);

  double tau_x_, tau_y_, omega_, lipschitz_e_, k_norm_sq_;
};

inline PdpsStepParams validate_pdps_steps(double tau_x, double tau_y, double L, double k_norm_sq,
                                          double omega = 1.0) {
  require(tau_x > 0 && tau_y > 0 && omega > 0, ErrorCode::invalid_argument,
          "PDPS step lengths and omega must be positive");
  require(L >= 0 && k_norm_sq >= 0, ErrorCode::invalid_argument, "PDPS bounds must be nonnegative");
  const double lhs = PdpsStepParams::condition(tau_x, tau_y, L, k_norm_sq);
  if (lhs > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "tau_x L/2 + tau_x tau_y |K|^2 = " << lhs << " exceeds 1 (slack " << 1.0 - lhs << ")";
    throw Error(ErrorCode::step_length_violation, msg.str());
  }
  return PdpsStepParams(tau_x, tau_y, omega, L, k_norm_sq);
}

inline PdpsStepParams PdpsStepParams::with_lipschitz(double L) const {
  return validate_pdps_steps(tau_x_, tau_y_, L, k_norm_sq_, omega_);
}

/// Callbacks defining min_x f0(x) + e(x) + g(Kx) for a given alpha.
/// An empty grad_e means e = 0.
struct InnerProblemCallbacks {
  std::function<Grid2(const Grid2&, double, const HyperParams&)> prox_f0;
  std::function<Grid2(const Grid2&, const HyperParams&)> grad_e;
  std::function<DualField(const DualField&, double, const HyperParams&)> prox_g_conj;
  GradientOperator K;
};

/// One PDPS step:
///   x+ = prox_{tau_x f0}(x - tau_x (K* y + grad e(x))),
///   y+ = prox_{tau_y g*}(y + tau_y K((1 + omega) x+ - omega x)).
inline PrimalDualState pdps_step(const PrimalDualState& u, const HyperParams& alpha,
                                 const InnerProblemCallbacks& cb, const PdpsStepParams& sp) {
  require(cb.prox_f0 && cb.prox_g_conj && static_cast<bool>(cb.K), ErrorCode::missing_callback,
          "pdps_step: prox_f0, prox_g_conj and K are required");
  const double tx = sp.tau_x(), ty = sp.tau_y(), om = sp.omega();

  Grid2 v = cb.K.adjoint(u.y);
  if (cb.grad_e) v += cb.grad_e(u.x, alpha);
  v *= -tx;
  v += u.x;
  Grid2 x_next = cb.prox_f0(v, tx, alpha);

  Grid2 extrapolated = (1.0 + om) * x_next;
  axpy(-om, u.x.values, extrapolated.values);
  DualField w = cb.K(extrapolated);
  w *= ty;
  w += u.y;
  DualField y_next = cb.prox_g_conj(w, ty, alpha);
  return PrimalDualState(std::move(x_next), std::move(y_next));
}

}  // namespace bata
