#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <numeric>
#include <vector>

#include "bata/core/grid.hpp"

namespace bata {

/// R(a) = beta (a2 + a3 + a4 - 1)^2 + indicator(a1 >= 0).
struct DeblurOuterRegParams {
  double beta = 1e4;
};

inline double deblur_outer_value(std::span<const double> a, const DeblurOuterRegParams& p) {
  require(a.size() == 4, ErrorCode::dimension_mismatch, "deblur regulariser expects 4 parameters");
  if (a[0] < 0) return std::numeric_limits<double>::infinity();
  const double s = a[1] + a[2] + a[3] - 1.0;
  return p.beta * s * s;
}

inline std::array<double, 4> prox_deblur_outer(const std::array<double, 4>& a_bar, double sigma,
                                               const DeblurOuterRegParams& p) {
  require(sigma > 0, ErrorCode::invalid_argument, "prox_deblur_outer: sigma must be positive");
  require(p.beta >= 0, ErrorCode::invalid_argument, "prox_deblur_outer: beta must be nonnegative");
  // (I + 2 sigma beta 11^T) a = a_bar + 2 sigma beta 1 on components 2..4; solve for
  // the sum first, then back-substitute.
  const double k = 2.0 * sigma * p.beta;
  const double sum_bar = a_bar[1] + a_bar[2] + a_bar[3];
  const double shift = k * (1.0 - sum_bar) / (1.0 + 3.0 * k);  // k (1 - sum)
  std::array<double, 4> out{};
  out[0] = std::max(0.0, a_bar[0]);
  for (int j = 1; j < 4; ++j) out[j] = a_bar[j] + shift;
  return out;
}

/// R(a) = beta w^T a + indicator(w^T a <= M) + indicator(a >= 0).
struct MriOuterRegParams {
  std::vector<double> w;
  double M = 0.15;
  double beta = 10.0;

  void validate(std::size_t n) const {
    require(w.size() == n, ErrorCode::dimension_mismatch, "MRI regulariser: weight vector length");
    require(M > 0 && beta > 0, ErrorCode::invalid_argument, "MRI regulariser: M and beta must be positive");
    double s = 0.0;
    for (double v : w) {
      require(v > 0, ErrorCode::invalid_argument, "MRI regulariser: weights must be positive");
      s += v;
    }
    require(std::abs(s - 1.0) < 1e-9, ErrorCode::invalid_argument, "MRI regulariser: weights must sum to 1");
  }
};

inline double mri_outer_value(std::span<const double> a, const MriOuterRegParams& p, double slack = 1e-12) {
  double wa = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0) return std::numeric_limits<double>::infinity();
    wa += p.w[i] * a[i];
  }
  if (wa > p.M + slack) return std::numeric_limits<double>::infinity();
  return p.beta * wa;
}

namespace detail {

struct DividingIndexResult {
  bool found = false;
  double lambda = 0.0;
};

inline double active_lambda(const std::vector<double>& a_bar, const std::vector<double>& w,
                            const std::vector<bool>& active, double tau_beta, double M) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a_bar.size(); ++i)
    if (active[i]) {
      num += w[i] * a_bar[i];
      den += w[i] * w[i];
    }
  if (den == 0.0) return tau_beta;
  return std::max((num - M) / den, tau_beta);
}

inline bool satisfies_dividing_condition(const std::vector<double>& ratio, const std::vector<bool>& active,
                                         double lambda, double tol) {
  for (std::size_t i = 0; i < ratio.size(); ++i) {
    if (ratio[i] > lambda + tol && !active[i]) return false;
    if (ratio[i] < lambda - tol && active[i]) return false;
  }
  return true;
}

}  // namespace detail

/// Proximal map of tau R for the MRI sparsity regulariser:
///   alpha_i = max(0, a_bar_i - w_i lambda),
///   lambda = max((w_I^T a_bar_I - M) / |w_I|^2, tau beta),
/// where the active set I = {i : a_bar_i / w_i above the threshold} is found by
/// sorting the ratios and scanning the dividing index. Near-ties at the threshold
/// fall back to enumerating the subsets of the tied indices (at most 2^12).
inline std::vector<double> prox_mri_outer(const std::vector<double>& a_bar, double tau,
                                          const MriOuterRegParams& p) {
  require(tau > 0, ErrorCode::invalid_argument, "prox_mri_outer: tau must be positive");
  p.validate(a_bar.size());
  const std::size_t n = a_bar.size();
  const double tau_beta = tau * p.beta;

  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = a_bar[i] / p.w[i];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return ratio[i] < ratio[j]; });

  double scale = tau_beta;
  for (double r : ratio) scale = std::max(scale, std::abs(r));
  const double tol = 1e-12 * scale;

  auto finish = [&](double lambda) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, a_bar[i] - p.w[i] * lambda);
    return out;
  };

  // Active set {order[k], ..., order[n-1]} for k = 0..n (k = n: empty set).
  std::vector<bool> active(n, true);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) active[order[k - 1]] = false;
    const double lambda = detail::active_lambda(a_bar, p.w, active, tau_beta, p.M);
    if (detail::satisfies_dividing_condition(ratio, active, lambda, tol)) return finish(lambda);
  }

  // Fallback: for every candidate split, try all in/out assignments of the indices
  // whose ratio lies within the tolerance band of the candidate threshold.
  for (std::size_t k = 0; k <= n; ++k) {
    std::fill(active.begin(), active.end(), false);
    for (std::size_t m = k; m < n; ++m) active[order[m]] = true;
    const double lambda0 = detail::active_lambda(a_bar, p.w, active, tau_beta, p.M);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(ratio[i] - lambda0) <= 1e3 * tol + 1e-9 * std::abs(lambda0)) tied.push_back(i);
    if (tied.empty()) continue;
    require(tied.size() <= 12, ErrorCode::no_dividing_index,
            "prox_mri_outer: " + std::to_string(tied.size()) + " tied indices exceed the enumeration cap");
    for (std::size_t mask = 0; mask < (std::size_t{1} << tied.size()); ++mask) {
      for (std::size_t b = 0; b < tied.size(); ++b) active[tied[b]] = (mask >> b) & 1U;
      const double lambda = detail::active_lambda(a_bar, p.w, active, tau_beta, p.M);
      if (detail::satisfies_dividing_condition(ratio, active, lambda, 1e3 * tol)) return finish(lambda);
    }
  }
  throw Error(ErrorCode::no_dividing_index, "prox_mri_outer: no valid dividing index");
}

}  // namespace bata
