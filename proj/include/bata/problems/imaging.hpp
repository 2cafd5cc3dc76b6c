#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "bata/adjoint/pdps_system.hpp"
#include "bata/core/metric.hpp"
#include "bata/driver/method.hpp"
#include "bata/inner/pdps.hpp"
#include "bata/linops/difference.hpp"

namespace bata {

/// Inner iterates and adjoint matrices, one per training example.
struct ImagingState {
  std::vector<PrimalDualState> u;
  std::vector<AdjointMatrix> p;
};

/// Step lengths and splitting parameters shared by the PDPS-based experiments.
struct PdpsSettings {
  double tau_x = 0.354;
  double tau_y = 0.350;
  double omega = 1.0;
  double identity_theta_x = 0.1;
  double identity_theta_y = 6.25e-4;
  double block_theta_y = 0.1;
  bool implicit_krylov = false;  // adjoint of the implicit method: Krylov instead of block-GS
  double krylov_tolerance = 1e-4;
  int krylov_max_iterations = 2000;
  ImplicitOptions implicit;
};

/// Bilevel imaging problem whose inner problem
///   min_x f0(x; a) + e(x; a) + g_{eps,delta}(D x; a)
/// is solved by PDPS with K = D, and whose outer data term is J = 1/2 sum |x_i - b_i|^2.
/// Experiments provide the operator-specific pieces.
class PdpsImagingProblem {
 public:
  using State = ImagingState;

  virtual ~PdpsImagingProblem() = default;

  Shape shape() const { return shape_; }
  std::size_t examples() const { return truth_.size(); }
  const std::vector<Grid2>& truth() const { return truth_; }
  const PdpsSettings& settings() const { return settings_; }
  PdpsSettings& settings() { return settings_; }
  const GradientOperator& K() const { return K_; }

  virtual std::size_t alpha_dim() const = 0;
  virtual HyperParams initial_alpha() const = 0;
  virtual InnerProblemCallbacks callbacks(std::size_t i, const HyperParams& a) const = 0;
  virtual double lipschitz_e(const HyperParams& a) const = 0;
  /// Gradient of f0 + e in x.
  virtual Grid2 grad_f(std::size_t i, const Grid2& x, const HyperParams& a) const = 0;
  virtual SmoothedTVConjParams tv_params(const HyperParams& a) const = 0;
  /// Linearised optimality system at u (Hessians and mixed derivatives).
  virtual PdpsAdjointSystem adjoint_system(std::size_t i, const PrimalDualState& u, const HyperParams& a) const = 0;
  virtual HyperParams outer_prox(const HyperParams& a, double sigma) const = 0;
  virtual double outer_regulariser(const HyperParams& a) const = 0;

  PdpsStepParams steps(const HyperParams& a) const {
    return validate_pdps_steps(settings_.tau_x, settings_.tau_y, lipschitz_e(a), kDiffNormSqBound, settings_.omega);
  }

  PdpsMetric metric() const { return PdpsMetric(settings_.tau_x, settings_.tau_y, settings_.omega, K_); }

  const Grid2& theta_x_inverse() const { return theta_x_inv_; }

  State zero_state() const {
    State s;
    for (std::size_t i = 0; i < examples(); ++i) {
      s.u.emplace_back(shape_);
      s.p.emplace_back(alpha_dim(), shape_);
    }
    return s;
  }

  SplittingScheme scheme(Method m) const {
    switch (m) {
      case Method::pdps_identity:
        return SplittingScheme::identity(settings_.identity_theta_x, settings_.identity_theta_y);
      case Method::pdps_block_gs:
        return SplittingScheme::block_gs(theta_x_inv_, settings_.block_theta_y);
      case Method::implicit:
        if (settings_.implicit_krylov)
          return SplittingScheme::none(settings_.krylov_tolerance, settings_.krylov_max_iterations);
        return SplittingScheme::block_gs(theta_x_inv_, settings_.block_theta_y);
    }
    return SplittingScheme::identity(1.0);
  }

  /// G(u; a) = (grad_x f + K* y, grad g*(y) - K x); zero exactly at the inner solution.
  PrimalDualState optimality_residual(std::size_t i, const PrimalDualState& u, const HyperParams& a) const {
    Grid2 gx = grad_f(i, u.x, a);
    gx += K_.adjoint(u.y);
    DualField gy = grad_smoothed_tv_conj(u.y, tv_params(a));
    gy -= K_(u.x);
    return PrimalDualState(std::move(gx), std::move(gy));
  }

  void inner_step(State& s, const HyperParams& a) const {
    const PdpsStepParams sp = steps(a);
    for (std::size_t i = 0; i < examples(); ++i) s.u[i] = pdps_step(s.u[i], a, callbacks(i, a), sp);
  }

  void adjoint_step(State& s, const HyperParams& a, const SplittingScheme& scheme) const {
    for (std::size_t i = 0; i < examples(); ++i) s.p[i] = splitting_step(s.p[i], adjoint_system(i, s.u[i], a), scheme);
  }

  /// sum_i sum over rows j of <p_{i,j,x}, x_i - b_i>.
  HyperParams hypergradient(const State& s, const HyperParams& a) const {
    HyperParams g(alpha_dim(), 0.0);
    for (std::size_t i = 0; i < examples(); ++i) {
      const Grid2 r = s.u[i].x - truth_[i];
      for (std::size_t j = 0; j < g.size(); ++j) g[j] += s.p[i].rows[j].x.dot(r);
    }
    (void)a;
    return g;
  }

  double outer_data(const State& s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < examples(); ++i) {
      const Grid2 r = s.u[i].x - truth_[i];
      acc += 0.5 * r.dot(r);
    }
    return acc;
  }

  double outer_value(const State& s, const HyperParams& a) const { return outer_data(s) + outer_regulariser(a); }

  /// sqrt(sum |u_i - ref_i|_Q^2) / sqrt(sum |ref_i|_Q^2) with Q the PDPS metric on D.
  double inner_distance_rel(const State& s, const State& ref) const {
    const PdpsMetric Q = metric();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < examples(); ++i) {
      num += std::pow(q_norm(s.u[i] - ref.u[i], Q), 2);
      den += std::pow(q_norm(ref.u[i], Q), 2);
    }
    require(den > 0.0, ErrorCode::invalid_argument, "inner_distance_rel: zero reference");
    return std::sqrt(num / den);
  }

  /// Max over examples and rows of |A p - b| / |b|.
  double adjoint_residual(const State& s, const HyperParams& a) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < examples(); ++i) {
      const PdpsAdjointSystem sys = adjoint_system(i, s.u[i], a);
      for (std::size_t j = 0; j < sys.components(); ++j) {
        const double bn = sys.rhs[j].norm();
        const double rn = sys.residual(j, s.p[i].rows[j]).norm();
        worst = std::max(worst, bn > 0 ? rn / bn : rn);
      }
    }
    return worst;
  }

  /// Many PDPS steps for the inner problem, then many adjoint steps (block-GS or a
  /// Krylov solve) at the final inner iterate. Warm-started from `warm` when given.
  ImplicitResult<State> implicit_solve(const HyperParams& a, const State* warm = nullptr,
                                       std::optional<ImplicitOptions> options = std::nullopt) const {
    const ImplicitOptions opt = options.value_or(settings_.implicit);
    ImplicitResult<State> res;
    res.state = warm ? *warm : zero_state();
    State& s = res.state;
    const PdpsStepParams sp = steps(a);
    for (std::size_t i = 0; i < examples(); ++i) {
      const InnerProblemCallbacks cb = callbacks(i, a);
      double rel = std::numeric_limits<double>::infinity();
      for (int k = 0; k < opt.inner_steps; ++k) {
        PrimalDualState next = pdps_step(s.u[i], a, cb, sp);
        const double scale = std::max(next.norm(), 1e-300);
        rel = (next - s.u[i]).norm() / scale;
        s.u[i] = std::move(next);
        if (opt.inner_tolerance > 0 && rel <= opt.inner_tolerance) break;
      }
      res.inner_residual = std::max(res.inner_residual, opt.inner_steps > 0 ? rel : 0.0);
    }
    if (opt.inner_tolerance > 0) res.inner_converged = res.inner_residual <= opt.inner_tolerance;

    if (opt.adjoint_steps <= 0) return res;
    if (settings_.implicit_krylov) {
      // adjoint_steps caps the Krylov iterations here.
      for (std::size_t i = 0; i < examples(); ++i) {
        KrylovResult kr;
        s.p[i] = krylov_solve(s.p[i], adjoint_system(i, s.u[i], a), settings_.krylov_tolerance,
                              opt.adjoint_steps, &kr);
        res.adjoint_converged = res.adjoint_converged && kr.converged;
      }
    } else {
      const SplittingScheme gs = SplittingScheme::block_gs(theta_x_inv_, settings_.block_theta_y);
      for (std::size_t i = 0; i < examples(); ++i) {
        const PdpsAdjointSystem sys = adjoint_system(i, s.u[i], a);
        for (int k = 0; k < opt.adjoint_steps; ++k) {
          s.p[i] = splitting_step(s.p[i], sys, gs);
          if (opt.adjoint_tolerance > 0 && k % 10 == 9) {
            double worst = 0.0;
            for (std::size_t j = 0; j < sys.components(); ++j) {
              const double bn = sys.rhs[j].norm();
              const double rn = sys.residual(j, s.p[i].rows[j]).norm();
              worst = std::max(worst, bn > 0 ? rn / bn : rn);
            }
            if (worst <= opt.adjoint_tolerance) break;
          }
        }
      }
    }
    res.adjoint_residual = adjoint_residual(s, a);
    if (opt.adjoint_tolerance > 0) res.adjoint_converged = res.adjoint_residual <= opt.adjoint_tolerance;
    return res;
  }

 protected:
  PdpsImagingProblem(std::vector<Grid2> truth, PdpsSettings settings)
      : truth_(std::move(truth)), settings_(settings), K_(make_difference_operator()) {
    require(!truth_.empty(), ErrorCode::invalid_argument, "imaging problem needs training data");
    shape_ = truth_.front().shape();
    for (const auto& b : truth_)
      require(b.shape() == shape_, ErrorCode::dimension_mismatch, "training images differ in shape");
    theta_x_inv_ = centered_to_fft_layout(theta_x_field(shape_.rows, shape_.cols));
  }

  Shape shape_;
  std::vector<Grid2> truth_;
  PdpsSettings settings_;
  GradientOperator K_;
  Grid2 theta_x_inv_;
};

}  // namespace bata
