#pragma once

#include "bata/problems/imaging.hpp"

namespace bata::verify {

/// Dense Newton iterations on G(u; a) = 0 for each training example, using the
/// assembled Jacobian [[hess_x f, K*], [-K, hess_y g*]]. Desk scale only.
/// Returns the largest final |G|.
inline double newton_polish(const PdpsImagingProblem& problem, ImagingState& s, const HyperParams& a,
                            double tolerance = 1e-13, int max_steps = 30) {
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.examples(); ++i) {
    double gnorm = 0.0;
    for (int k = 0; k <= max_steps; ++k) {
      const PrimalDualState G = problem.optimality_residual(i, s.u[i], a);
      gnorm = G.norm();
      if (gnorm <= tolerance || k == max_steps) break;
      const dense::Matrix J = to_dense(problem.adjoint_system(i, s.u[i], a));
      const auto g = G.flatten();
      const dense::Vector step = J.partialPivLu().solve(-Eigen::Map<const dense::Vector>(g.data(), static_cast<Eigen::Index>(g.size())));
      const std::vector<double> sv(step.data(), step.data() + step.size());
      s.u[i] += PrimalDualState::unflatten(problem.shape(), sv);
    }
    worst = std::max(worst, gnorm);
  }
  return worst;
}

/// Dense direct solve of every adjoint row at the current inner iterates.
inline void exact_adjoint(const PdpsImagingProblem& problem, ImagingState& s, const HyperParams& a) {
  for (std::size_t i = 0; i < problem.examples(); ++i) {
    const PdpsAdjointSystem sys = problem.adjoint_system(i, s.u[i], a);
    const auto lu = to_dense(sys).partialPivLu();
    const dense::Matrix B = dense_targets(sys);
    dense::Matrix P(B.rows(), B.cols());
    for (Eigen::Index r = 0; r < B.rows(); ++r) P.row(r) = lu.solve(dense::Vector(B.row(r).transpose())).transpose();
    s.p[i] = from_dense(P, problem.shape());
  }
}

/// Inner solution to Newton accuracy: PDPS warm-up, then Newton.
inline ImagingState exact_inner(const PdpsImagingProblem& problem, const HyperParams& a, int warmup = 3000,
                                const ImagingState* warm = nullptr, double* residual = nullptr) {
  ImplicitOptions opt;
  opt.inner_steps = warmup;
  opt.adjoint_steps = 0;
  PdpsImagingProblem::State s = warm ? *warm : problem.zero_state();
  const PdpsStepParams sp = problem.steps(a);
  for (std::size_t i = 0; i < problem.examples(); ++i) {
    const InnerProblemCallbacks cb = problem.callbacks(i, a);
    for (int k = 0; k < warmup; ++k) s.u[i] = pdps_step(s.u[i], a, cb, sp);
  }
  const double r = newton_polish(problem, s, a);
  if (residual) *residual = r;
  return s;
}

}  // namespace bata::verify
