#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "bata/core/grid.hpp"

namespace bata {

/// Parameters of the C^2, delta-strongly convex surrogate of the dual TV indicator
///   g*(y) = sum_j max(0, (|y_j| - alpha0)^3 / (3 eps)) + delta/2 |y_j|^2.
struct SmoothedTVConjParams {
  double epsilon = 1e-6;
  double delta = 1e-4;
  double alpha0 = 0.02;

  void validate() const {
    require(epsilon > 0 && delta > 0, ErrorCode::invalid_argument,
            "smoothed TV conjugate needs epsilon, delta > 0");
    require(alpha0 >= 0, ErrorCode::invalid_argument, "smoothed TV conjugate needs alpha0 >= 0");
  }
};

/// Symmetric 2x2 block [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0, xy = 0, yy = 0;

  double det() const { return xx * yy - xy * xy; }
  std::array<double, 2> apply(double a, double b) const { return {xx * a + xy * b, xy * a + yy * b}; }
};

/// One 2x2 block per pixel.
using PixelBlocks = std::vector<Sym2>;

inline double smoothed_tv_conj_value(const DualField& y, const SmoothedTVConjParams& p) {
  double acc = 0.0;
  for (std::size_t j = 0; j < y.pixels(); ++j) {
    const double r = y.pixel_norm(j);
    const double h = std::max(0.0, r - p.alpha0);
    acc += h * h * h / (3.0 * p.epsilon) + 0.5 * p.delta * r * r;
  }
  return acc;
}

inline DualField grad_smoothed_tv_conj(const DualField& y, const SmoothedTVConjParams& p) {
  DualField g(y.shape());
  for (std::size_t j = 0; j < y.pixels(); ++j) {
    const double a = y.at(j, 0), b = y.at(j, 1);
    const double r = std::hypot(a, b);
    double s = p.delta;
    if (r >= p.alpha0 && r > 0.0) s += (r - p.alpha0) * (r - p.alpha0) / (p.epsilon * r);
    g.at(j, 0) = s * a;
    g.at(j, 1) = s * b;
  }
  return g;
}

inline Sym2 hess_smoothed_tv_conj_pixel(double a, double b, const SmoothedTVConjParams& p) {
  Sym2 h{p.delta, 0.0, p.delta};
  const double r = std::hypot(a, b);
  if (r <= p.alpha0 || r == 0.0) return h;
  const double d = r - p.alpha0;
  // (I - yy^T/r^2) d^2 / (eps r) + 2 yy^T/r^2 d / eps
  const double iso = d * d / (p.epsilon * r);
  const double rad = 2.0 * d / p.epsilon - iso;
  const double r2 = r * r;
  h.xx += iso + rad * a * a / r2;
  h.xy += rad * a * b / r2;
  h.yy += iso + rad * b * b / r2;
  return h;
}

inline PixelBlocks hess_smoothed_tv_conj(const DualField& y, const SmoothedTVConjParams& p) {
  PixelBlocks h(y.pixels());
  for (std::size_t j = 0; j < y.pixels(); ++j) h[j] = hess_smoothed_tv_conj_pixel(y.at(j, 0), y.at(j, 1), p);
  return h;
}

inline DualField apply_blocks(const PixelBlocks& blocks, const DualField& v) {
  require(blocks.size() == v.pixels(), ErrorCode::dimension_mismatch, "apply_blocks");
  DualField out(v.shape());
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto r = blocks[j].apply(v.at(j, 0), v.at(j, 1));
    out.at(j, 0) = r[0];
    out.at(j, 1) = r[1];
  }
  return out;
}

/// d/d alpha0 of grad g*: -(2/eps)(y_j/|y_j|)(|y_j| - alpha0) outside the ball, zero inside.
inline DualField grad_smoothed_tv_conj_dalpha0(const DualField& y, const SmoothedTVConjParams& p) {
  DualField g(y.shape());
  for (std::size_t j = 0; j < y.pixels(); ++j) {
    const double r = y.pixel_norm(j);
    if (r <= p.alpha0 || r == 0.0) continue;
    const double s = -2.0 * (r - p.alpha0) / (p.epsilon * r);
    g.at(j, 0) = s * y.at(j, 0);
    g.at(j, 1) = s * y.at(j, 1);
  }
  return g;
}

/// Scale factor t with prox_{tau g*}(v)_j = t v_j for a pixel with |v_j| = vn.
inline double prox_smoothed_tv_conj_scale(double vn, double tau, const SmoothedTVConjParams& p) {
  const double shrink = 1.0 + tau * p.delta;
  if (vn < shrink * p.alpha0 || vn == 0.0) return 1.0 / shrink;
  const double eps = p.epsilon, a0 = p.alpha0;
  const double c = 1.0 / tau + p.delta;
  const double disc = std::max(0.0, eps * eps * c * c + 4.0 * eps * (vn / tau - c * a0));
  return (2.0 * a0 - eps * c + std::sqrt(disc)) / (2.0 * vn);
}

/// Pixelwise proximal map of tau g*. Inside (|v_j| < (1 + tau delta) alpha0) the
/// map is a plain shrink; outside it scales v_j by the positive root of the
/// quadratic optimality condition.
inline DualField prox_smoothed_tv_conj(const DualField& v, double tau, const SmoothedTVConjParams& p) {
  require(tau > 0, ErrorCode::invalid_argument, "prox_smoothed_tv_conj: tau must be positive");
  DualField out(v.shape());
  for (std::size_t j = 0; j < v.pixels(); ++j) {
    const double t = prox_smoothed_tv_conj_scale(v.pixel_norm(j), tau, p);
    out.at(j, 0) = t * v.at(j, 0);
    out.at(j, 1) = t * v.at(j, 1);
  }
  return out;
}

}  // namespace bata
