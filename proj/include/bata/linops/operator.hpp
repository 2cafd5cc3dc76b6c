#pragma once

#include <functional>
#include <random>

#include "bata/core/grid.hpp"

namespace bata {

/// Type-erased bounded linear operator In -> Out together with its Hilbert adjoint.
template <class In, class Out>
struct LinearOperator {
  std::function<Out(const In&)> apply;
  std::function<In(const Out&)> adjoint_apply;
  double norm_bound = 0.0;  // upper bound on the operator norm

  Out operator()(const In& x) const { return apply(x); }
  In adjoint(const Out& y) const { return adjoint_apply(y); }
  explicit operator bool() const { return apply && adjoint_apply; }
};

using ImageOperator = LinearOperator<Grid2, Grid2>;
using GradientOperator = LinearOperator<Grid2, DualField>;

template <class Field>
Field random_like(const Field& shape_source, std::mt19937_64& rng, double scale = 1.0) {
  Field out = shape_source;
  std::normal_distribution<double> n(0.0, scale);
  for (double& v : out.values) v = n(rng);
  return out;
}

/// Largest |<Ax, y> - <x, A*y>| / (|Ax||y|) over random probes.
template <class In, class Out>
double adjoint_probe_error(const LinearOperator<In, Out>& op, const In& in_proto, const Out& out_proto,
                           int probes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    In x = random_like(in_proto, rng);
    Out y = random_like(out_proto, rng);
    Out ax = op(x);
    In aty = op.adjoint(y);
    double lhs = ax.dot(y);
    double rhs = x.dot(aty);
    double scale = std::max(ax.norm() * y.norm(), x.norm() * aty.norm());
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

/// Power iteration on A*A; returns the estimate of |A|^2.
template <class In, class Out>
double operator_norm_sq_estimate(const LinearOperator<In, Out>& op, const In& proto, int iterations,
                                 std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  In x = random_like(proto, rng);
  x *= 1.0 / x.norm();
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    In next = op.adjoint(op(x));
    estimate = next.norm();
    if (estimate == 0.0) return 0.0;
    next *= 1.0 / estimate;
    x = std::move(next);
  }
  return estimate;
}

}  // namespace bata
