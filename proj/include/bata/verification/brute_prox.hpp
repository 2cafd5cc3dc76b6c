#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <deque>
#include <functional>
#include <random>

#include "bata/verification/report.hpp"

namespace bata::verify {

using Vec = Eigen::VectorXd;

/// Prox problem instance: minimise 1/2 |z - v|^2 + tau R(z) over the set C.
/// `smooth_r` is R restricted to (a neighbourhood of) C and must be differentiable
/// there; C enters only through `project`.
struct ProxInstance {
  Vec v;
  double tau = 1.0;
};

struct MinimizerOptions {
  int max_iterations = 100000;
  double tolerance = 1e-14;
  double fd_step = 1e-7;
};

/// Central-difference gradient of a scalar function.
inline Vec numeric_gradient(const std::function<double(const Vec&)>& f, const Vec& z, double h) {
  Vec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double hi = h * std::max(1.0, std::abs(z[i]));
    Vec a = z, b = z;
    a[i] += hi;
    b[i] -= hi;
    g[i] = (f(a) - f(b)) / (2.0 * hi);
  }
  return g;
}

/// Spectral projected gradient (nonmonotone Armijo search, Barzilai-Borwein steps)
/// driven only by objective values and a projection.
inline Vec projected_gradient_minimize(const std::function<double(const Vec&)>& f,
                                       const std::function<Vec(const Vec&)>& project, Vec z,
                                       const MinimizerOptions& opt = {}) {
  z = project(z);
  Vec g = numeric_gradient(f, z, opt.fd_step);
  double lambda = 1.0;
  std::deque<double> recent{f(z)};
  for (int k = 0; k < opt.max_iterations; ++k) {
    const Vec d = project(z - lambda * g) - z;
    if (d.norm() <= opt.tolerance * std::max(1.0, z.norm())) break;
    const double fmax = *std::max_element(recent.begin(), recent.end());
    const double slope = g.dot(d);
    double t = 1.0;
    Vec trial = z + d;
    double ft = f(trial);
    while (ft > fmax + 1e-4 * t * slope && t > 1e-20) {
      t *= 0.5;
      trial = z + t * d;
      ft = f(trial);
    }
    const Vec s = trial - z;
    const Vec g_new = numeric_gradient(f, trial, opt.fd_step);
    const Vec y = g_new - g;
    const double sy = s.dot(y);
    lambda = sy > 0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : 1e12;
    z = trial;
    g = g_new;
    recent.push_back(ft);
    if (recent.size() > 10) recent.pop_front();
    if (s.norm() == 0.0) break;
  }
  return z;
}

/// Dykstra's alternating projections onto the intersection of two convex sets.
inline Vec dykstra(const std::function<Vec(const Vec&)>& pa, const std::function<Vec(const Vec&)>& pb, const Vec& v,
                   int max_iterations = 100000, double tolerance = 1e-16) {
  Vec x = v, p = Vec::Zero(v.size()), q = Vec::Zero(v.size());
  for (int k = 0; k < max_iterations; ++k) {
    const Vec y = pa(x + p);
    p = x + p - y;
    const Vec x_new = pb(y + q);
    q = y + q - x_new;
    const double change = (x_new - x).norm();
    x = x_new;
    if (change <= tolerance * std::max(1.0, x.norm())) break;
  }
  return x;
}

/// Compares `prox(instance)` with the brute-force minimiser over `trials` random
/// instances; the error is |prox - brute| / max(|brute|, |v|).
inline OracleReport brute_prox_oracle(const std::string& name,
                                      const std::function<Vec(const ProxInstance&)>& prox,
                                      const std::function<double(const Vec&)>& smooth_r,
                                      const std::function<Vec(const Vec&)>& project,
                                      const std::function<ProxInstance(std::mt19937_64&)>& sample, int trials,
                                      double tolerance, std::uint64_t seed = 1, MinimizerOptions opt = {}) {
  OracleReport rep;
  rep.name = name;
  rep.tolerance = tolerance;
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const ProxInstance inst = sample(rng);
    const auto objective = [&](const Vec& z) { return 0.5 * (z - inst.v).squaredNorm() + inst.tau * smooth_r(z); };
    const Vec fast = prox(inst);
    const Vec brute = projected_gradient_minimize(objective, project, inst.v, opt);
    const double scale = std::max({brute.norm(), inst.v.norm(), 1e-300});
    rep.max_rel_error = std::max(rep.max_rel_error, (fast - brute).norm() / scale);
    ++rep.instances;
  }
  rep.finalize();
  return rep;
}

}  // namespace bata::verify
