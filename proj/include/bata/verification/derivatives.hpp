#pragma once

#include <random>

#include "bata/problems/imaging.hpp"
#include "bata/verification/report.hpp"

namespace bata::verify {

namespace detail {

/// Random dual field with every pixel norm in [lo, hi] * alpha0.
inline DualField ring_sample(Shape s, double alpha0, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DualField y(s);
  for (std::size_t j = 0; j < y.pixels(); ++j) {
    const double r = alpha0 * (lo + (hi - lo) * u(rng)), phi = 2.0 * std::numbers::pi * u(rng);
    y.at(j, 0) = r * std::cos(phi);
    y.at(j, 1) = r * std::sin(phi);
  }
  return y;
}

inline double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

}  // namespace detail

/// grad g* against central differences of g* (h = 1e-6 alpha0), pixels outside the ball
/// at |y_j| in (1.1, 2) alpha0 and inside at (0, 0.9) alpha0.
inline OracleReport tv_gradient_check(int trials, std::uint64_t seed = 21, double tolerance = 1e-5) {
  OracleReport rep;
  rep.name = "grad_smoothed_tv_conj";
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  const Shape s{1, 1};
  for (int t = 0; t < trials; ++t) {
    SmoothedTVConjParams p{std::pow(10.0, -6.0 + 4.0 * (t % 5) / 4.0), 1e-4, 0.02};
    const bool outside = t % 2 == 0;
    const DualField y = outside ? detail::ring_sample(s, p.alpha0, 1.1, 2.0, rng)
                                : detail::ring_sample(s, p.alpha0, 0.0, 0.9, rng);
    const DualField g = grad_smoothed_tv_conj(y, p);
    const double h = 1e-6 * p.alpha0;
    DualField fd(s);
    for (int k = 0; k < 2; ++k) {
      DualField a = y, b = y;
      a.values[k] += h;
      b.values[k] -= h;
      fd.values[k] = (smoothed_tv_conj_value(a, p) - smoothed_tv_conj_value(b, p)) / (2.0 * h);
    }
    rep.max_rel_error = std::max(rep.max_rel_error, detail::rel((g - fd).norm(), g.norm()));
    ++rep.instances;
  }
  rep.finalize();
  return rep;
}

/// Hessian-vector products of g* against central differences of grad g*.
inline OracleReport tv_hessian_check(int trials, std::uint64_t seed = 22, double tolerance = 1e-4) {
  OracleReport rep;
  rep.name = "hess_smoothed_tv_conj";
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  const Shape s{4, 4};
  for (int t = 0; t < trials; ++t) {
    SmoothedTVConjParams p{std::pow(10.0, -6.0 + 4.0 * (t % 5) / 4.0), 1e-4, 0.02};
    DualField y = detail::ring_sample(s, p.alpha0, 1.1, 2.0, rng);
    for (std::size_t j = 0; j < y.pixels(); j += 3) {  // a few pixels inside the ball
      y.at(j, 0) *= 0.3;
      y.at(j, 1) *= 0.3;
    }
    DualField v(s);
    for (double& x : v.values) x = n(rng);
    const DualField hv = apply_blocks(hess_smoothed_tv_conj(y, p), v);
    const double h = 1e-7 * p.alpha0 / v.norm();
    DualField fd = grad_smoothed_tv_conj(y + h * v, p);
    fd -= grad_smoothed_tv_conj(y - h * v, p);
    fd *= 1.0 / (2.0 * h);
    rep.max_rel_error = std::max(rep.max_rel_error, detail::rel((hv - fd).norm(), hv.norm()));
    ++rep.instances;
  }
  rep.finalize();
  return rep;
}

/// d/d alpha0 of grad g* against central differences in alpha0.
inline OracleReport tv_alpha0_check(int trials, std::uint64_t seed = 23, double tolerance = 1e-4) {
  OracleReport rep;
  rep.name = "grad_smoothed_tv_conj_dalpha0";
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  const Shape s{4, 4};
  for (int t = 0; t < trials; ++t) {
    SmoothedTVConjParams p{std::pow(10.0, -6.0 + 4.0 * (t % 5) / 4.0), 1e-4, 0.02};
    const DualField y = detail::ring_sample(s, p.alpha0, 1.1, 2.0, rng);
    const DualField d = grad_smoothed_tv_conj_dalpha0(y, p);
    const double h = 1e-6 * p.alpha0;
    SmoothedTVConjParams pp = p, pm = p;
    pp.alpha0 += h;
    pm.alpha0 -= h;
    DualField fd = grad_smoothed_tv_conj(y, pp);
    fd -= grad_smoothed_tv_conj(y, pm);
    fd *= 1.0 / (2.0 * h);
    rep.max_rel_error = std::max(rep.max_rel_error, detail::rel((d - fd).norm(), d.norm()));
    ++rep.instances;
  }
  rep.finalize();
  return rep;
}

/// A random inner point for the Jacobian checks: x random, every y_j away from the
/// ring |y_j| = alpha0 (half inside, half outside).
inline PrimalDualState off_ring_state(const PdpsImagingProblem& problem, const HyperParams& a, std::mt19937_64& rng) {
  const double alpha0 = problem.tv_params(a).alpha0;
  const Shape s = problem.shape();
  std::normal_distribution<double> n;
  Grid2 x(s);
  for (double& v : x.values) v = 0.5 + 0.2 * n(rng);
  DualField y = detail::ring_sample(s, alpha0, 1.2, 2.0, rng);
  for (std::size_t j = 0; j < y.pixels(); j += 2) {
    y.at(j, 0) *= 0.4;
    y.at(j, 1) *= 0.4;
  }
  return PrimalDualState(std::move(x), std::move(y));
}

/// Rows of the adjoint right-hand side (d/d a_j of the optimality map G) against central
/// differences of G in a_j, plus A v against central differences of G in u along v.
inline OracleReport mixed_derivative_check(const std::string& name, const PdpsImagingProblem& problem,
                                           const HyperParams& a, int trials, std::uint64_t seed = 24,
                                           double tolerance = 1e-4, double h = 1e-5) {
  OracleReport rep;
  rep.name = name;
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  for (int t = 0; t < trials; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) % problem.examples();
    const PrimalDualState u = off_ring_state(problem, a, rng);
    const PdpsAdjointSystem sys = problem.adjoint_system(i, u, a);
    for (std::size_t j = 0; j < a.size(); ++j) {
      HyperParams ap = a, am = a;
      ap[j] += h;
      am[j] -= h;
      PrimalDualState fd = problem.optimality_residual(i, u, ap);
      fd -= problem.optimality_residual(i, u, am);
      fd *= 1.0 / (2.0 * h);
      const double scale = std::max(sys.rhs[j].norm(), fd.norm());
      if (scale > 0) rep.max_rel_error = std::max(rep.max_rel_error, (sys.rhs[j] - fd).norm() / scale);
    }
    PrimalDualState v(problem.shape());
    for (double& x : v.x.values) x = n(rng);
    for (double& x : v.y.values) x = n(rng);
    // Small enough that no y_j crosses the ring.
    const double hu = 1e-3 * problem.tv_params(a).alpha0 / v.norm();
    PrimalDualState fd = problem.optimality_residual(i, u + hu * v, a);
    fd -= problem.optimality_residual(i, u - hu * v, a);
    fd *= 1.0 / (2.0 * hu);
    const PrimalDualState av = sys.apply(v);
    rep.max_rel_error = std::max(rep.max_rel_error, detail::rel((av - fd).norm(), av.norm()));
    ++rep.instances;
  }
  rep.finalize();
  return rep;
}

}  // namespace bata::verify
