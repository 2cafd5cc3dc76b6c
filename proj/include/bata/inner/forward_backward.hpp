#pragma once

#include <functional>

#include "bata/core/grid.hpp"

namespace bata {

/// Step length for forward-backward splitting, validated against tau L <= 2.
class ForwardBackwardStep {
 public:
  ForwardBackwardStep(double tau, double lipschitz) : tau_(tau), lipschitz_(lipschitz) {
    require(tau > 0 && lipschitz >= 0, ErrorCode::invalid_argument, "forward-backward: bad step parameters");
    require(tau * lipschitz <= 2.0 + 1e-12, ErrorCode::step_length_violation,
            "forward-backward: tau L = " + std::to_string(tau * lipschitz) + " exceeds 2");
  }
  double tau() const { return tau_; }
  double lipschitz() const { return lipschitz_; }

 private:
  double tau_, lipschitz_;
};

/// u+ = prox_{tau g}(u - tau grad f(u)). An empty prox_g means g = 0.
template <class Field>
Field fb_step(const Field& u, const HyperParams& alpha,
              const std::function<Field(const Field&, const HyperParams&)>& grad_f,
              const std::function<Field(const Field&, double, const HyperParams&)>& prox_g,
              const ForwardBackwardStep& step) {
  require(static_cast<bool>(grad_f), ErrorCode::missing_callback, "fb_step: grad_f is required");
  Field v = grad_f(u, alpha);
  v *= -step.tau();
  v += u;
  if (!prox_g) return v;
  return prox_g(v, step.tau(), alpha);
}

}  // namespace bata
