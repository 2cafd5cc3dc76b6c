#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bata/core/grid.hpp"

namespace bata {

struct KrylovResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Restarted GMRES(m). `x` holds the initial guess and receives the solution. Stops when
/// |b - A x| <= tol |b| or after `max_iterations` operator applications (across restarts).
/// The residual never increases, so a capped run still returns its best iterate.
template <class Vec>
KrylovResult gmres(const std::function<Vec(const Vec&)>& apply, const Vec& b, Vec& x, double tol,
                   int max_iterations, int restart = 60) {
  KrylovResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x *= 0.0;
    res.converged = true;
    return res;
  }
  while (true) {
    const Vec r = b - apply(x);
    const double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (beta <= tol * bnorm) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= max_iterations) return res;
    const int m = std::min(restart, max_iterations - res.iterations);
    std::vector<Vec> V;
    V.push_back((1.0 / beta) * r);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs(m), sn(m), g = Eigen::VectorXd::Zero(m + 1);
    g[0] = beta;
    int k = 0;
    while (k < m) {
      Vec w = apply(V[static_cast<std::size_t>(k)]);
      ++res.iterations;
      // modified Gram-Schmidt, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= k; ++i) {
          const double h = V[static_cast<std::size_t>(i)].dot(w);
          H(i, k) += h;
          w -= h * V[static_cast<std::size_t>(i)];
        }
      const double hn = w.norm();
      H(k + 1, k) = hn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double den = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = den == 0.0 ? 1.0 : H(k, k) / den;
      sn[k] = den == 0.0 ? 0.0 : H(k + 1, k) / den;
      H(k, k) = den;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++k;
      if (std::abs(g[k]) <= tol * bnorm || hn == 0.0) break;
      V.push_back((1.0 / hn) * w);
    }
    const Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) x += y[i] * V[static_cast<std::size_t>(i)];
  }
}

}  // namespace bata
