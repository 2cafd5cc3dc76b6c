#pragma once

#include <random>

#include "bata/adjoint/dense.hpp"
#include "bata/verification/report.hpp"

namespace bata::verify {

/// One instance of the three-point inequality for F(x) = 1/2 x^T H x, gamma I <= H <= L I:
///   <grad F(z) - grad F(xh), x - xh>
///     >= (gamma - t L)/2 (|x - xh|^2 + |z - xh|^2) - L/(4t) |x - z|^2.
/// Returns lhs - rhs (nonnegative when the inequality holds).
inline double three_point_margin(const dense::Matrix& H, double gamma, double L, const dense::Vector& x,
                                 const dense::Vector& z, const dense::Vector& xh, double t) {
  require(t > 0, ErrorCode::invalid_argument, "three_point_margin: t must be positive");
  const double lhs = (H * (z - xh)).dot(x - xh);
  const double rhs =
      0.5 * (gamma - t * L) * ((x - xh).squaredNorm() + (z - xh).squaredNorm()) - L / (4.0 * t) * (x - z).squaredNorm();
  return lhs - rhs;
}

struct ThreePointResult {
  OracleReport report;
  int violations = 0;
};

/// Random quadratics (dimension 1..max_dim, spectrum in [gamma, L]), random points and
/// t log-uniform in [1e-3, 1e3]. A violation is a margin below -slack * scale, where
/// scale is the size of the terms involved; max_rel_error holds the worst such ratio.
inline ThreePointResult three_point_monotonicity_check(int trials, std::uint64_t seed = 0, int max_dim = 10,
                                                        double slack = 1e-12) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ThreePointResult out;
  out.report.name = "three_point_monotonicity";
  out.report.tolerance = slack;
  for (int trial = 0; trial < trials; ++trial) {
    const int d = 1 + static_cast<int>(u(rng) * max_dim) % max_dim;
    const double gamma = std::pow(10.0, -2.0 + 2.0 * u(rng));
    const double L = gamma * std::pow(10.0, 2.0 * u(rng));
    dense::Matrix G(d, d);
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = n(rng);
    const dense::Matrix V = Eigen::HouseholderQR<dense::Matrix>(G).householderQ();
    dense::Vector lam(d);
    for (int i = 0; i < d; ++i) lam[i] = gamma + (L - gamma) * u(rng);
    lam[0] = gamma;
    if (d > 1) lam[d - 1] = L;
    const dense::Matrix H = V * lam.asDiagonal() * V.transpose();
    auto vec = [&] {
      dense::Vector v(d);
      for (int i = 0; i < d; ++i) v[i] = n(rng);
      return v;
    };
    const dense::Vector x = vec(), xh = vec();
    const dense::Vector z = u(rng) < 0.1 ? x : vec();  // z = x now and then
    const double t = std::pow(10.0, -3.0 + 6.0 * u(rng));
    const double margin = three_point_margin(H, gamma, L, x, z, xh, t);
    const double scale = std::max(1.0, L * ((x - xh).squaredNorm() + (z - xh).squaredNorm()) * (t + 1.0 / t));
    const double rel = std::max(0.0, -margin / scale);
    if (rel > slack) ++out.violations;
    out.report.max_rel_error = std::max(out.report.max_rel_error, rel);
    ++out.report.instances;
  }
  out.report.finalize();
  return out;
}

}  // namespace bata::verify
