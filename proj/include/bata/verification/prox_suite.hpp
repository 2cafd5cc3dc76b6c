#pragma once

#include <numeric>

#include "bata/linops/fft2.hpp"
#include "bata/prox/mri_data.hpp"
#include "bata/prox/outer.hpp"
#include "bata/prox/smoothed_tv.hpp"
#include "bata/verification/brute_prox.hpp"

namespace bata::verify {

// Brute-force checks of the four proximal maps on small random instances.
// Parameters are drawn per trial inside the sampler, so each instance carries
// its own R; the sampler stores them in the captured state before returning.

namespace detail {

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

inline Vec identity_projection(const Vec& z) { return z; }

}  // namespace detail

/// One pixel of prox_{tau g*}: a 2-dim problem with |v| spread around the ring.
inline OracleReport prox_smoothed_tv_oracle(int trials, std::uint64_t seed = 11, double tolerance = 1e-6) {
  SmoothedTVConjParams p;
  std::mt19937_64 prng(seed + 1);
  auto sample = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    p.alpha0 = detail::log_uniform(prng, 0.005, 0.5);
    p.epsilon = detail::log_uniform(prng, 1e-6, 1e-1);
    p.delta = detail::log_uniform(prng, 1e-5, 1e-1);
    ProxInstance inst;
    inst.tau = detail::log_uniform(rng, 0.05, 2.0);
    const double r = 3.0 * p.alpha0 * u(rng), phi = 2.0 * std::numbers::pi * u(rng);
    inst.v = Vec(2);
    inst.v << r * std::cos(phi), r * std::sin(phi);
    return inst;
  };
  auto prox = [&](const ProxInstance& inst) {
    DualField v(Shape{1, 1}, {inst.v[0], inst.v[1]});
    const DualField y = prox_smoothed_tv_conj(v, inst.tau, p);
    Vec out(2);
    out << y.values[0], y.values[1];
    return out;
  };
  auto r = [&](const Vec& z) {
    return smoothed_tv_conj_value(DualField(Shape{1, 1}, {z[0], z[1]}), p);
  };
  return brute_prox_oracle("prox_smoothed_tv_conj", prox, r, detail::identity_projection, sample, trials, tolerance,
                           seed);
}

/// prox of sigma (beta (a2 + a3 + a4 - 1)^2 + indicator(a1 >= 0)).
inline OracleReport prox_deblur_outer_oracle(int trials, std::uint64_t seed = 12, double tolerance = 1e-6) {
  DeblurOuterRegParams p;
  auto sample = [&](std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    ProxInstance inst;
    inst.tau = detail::log_uniform(rng, 1e-4, 1.0);
    p.beta = detail::log_uniform(rng, 1e-2, 1e2) / inst.tau;
    inst.v = Vec(4);
    for (int i = 0; i < 4; ++i) inst.v[i] = n(rng);
    return inst;
  };
  auto prox = [&](const ProxInstance& inst) {
    const auto a = prox_deblur_outer({inst.v[0], inst.v[1], inst.v[2], inst.v[3]}, inst.tau, p);
    return Vec(Eigen::Map<const Vec>(a.data(), 4));
  };
  auto r = [&](const Vec& z) {
    const double s = z[1] + z[2] + z[3] - 1.0;
    return p.beta * s * s;
  };
  auto project = [](const Vec& z) {
    Vec out = z;
    out[0] = std::max(0.0, out[0]);
    return out;
  };
  return brute_prox_oracle("prox_deblur_outer", prox, r, project, sample, trials, tolerance, seed);
}

/// prox of tau (beta w^T a + indicator(w^T a <= M) + indicator(a >= 0)) in three dimensions.
inline OracleReport prox_mri_outer_oracle(int trials, std::uint64_t seed = 13, double tolerance = 1e-6,
                                          std::size_t dim = 3) {
  MriOuterRegParams p;
  auto sample = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n;
    p.w.assign(dim, 0.0);
    for (double& v : p.w) v = 0.1 + u(rng);
    const double s = std::accumulate(p.w.begin(), p.w.end(), 0.0);
    for (double& v : p.w) v /= s;
    p.M = 0.05 + 0.5 * u(rng);
    p.beta = detail::log_uniform(rng, 0.1, 10.0);
    ProxInstance inst;
    inst.tau = detail::log_uniform(rng, 1e-3, 0.5);
    inst.v = Vec(static_cast<Eigen::Index>(dim));
    for (auto& v : inst.v) v = 0.3 + 0.6 * n(rng);
    return inst;
  };
  auto prox = [&](const ProxInstance& inst) {
    const std::vector<double> a(inst.v.data(), inst.v.data() + inst.v.size());
    const auto out = prox_mri_outer(a, inst.tau, p);
    return Vec(Eigen::Map<const Vec>(out.data(), static_cast<Eigen::Index>(out.size())));
  };
  auto r = [&](const Vec& z) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) acc += p.w[i] * z[static_cast<Eigen::Index>(i)];
    return p.beta * acc;
  };
  // C = {z >= 0} intersected with {w^T z <= M}.
  auto project = [&](const Vec& z) {
    const Vec w = Eigen::Map<const Vec>(p.w.data(), static_cast<Eigen::Index>(dim));
    auto orthant = [](const Vec& x) { return Vec(x.cwiseMax(0.0)); };
    auto halfspace = [&](const Vec& x) {
      const double excess = w.dot(x) - p.M;
      return excess > 0 ? Vec(x - excess / w.squaredNorm() * w) : x;
    };
    return dykstra(orthant, halfspace, z);
  };
  return brute_prox_oracle("prox_mri_outer", prox, r, project, sample, trials, tolerance, seed);
}

/// prox of tau/2 |Z (F x - z)|^2 on a 2x2 image (four unknowns).
inline OracleReport prox_mri_data_oracle(int trials, std::uint64_t seed = 14, double tolerance = 1e-6) {
  const Shape s{2, 2};
  const Fft2 fft(s);
  MaskParams m{{1.0, 1.0}, {0, 1}};
  ComplexField z(s);
  auto sample = [&](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::normal_distribution<double> n;
    m.weights = {u(rng), u(rng)};
    for (auto& v : z.values) v = cplx(n(rng), n(rng));
    ProxInstance inst;
    inst.tau = detail::log_uniform(rng, 0.05, 5.0);
    inst.v = Vec(4);
    for (auto& v : inst.v) v = n(rng);
    return inst;
  };
  auto prox = [&](const ProxInstance& inst) {
    const Grid2 x = prox_mri_data(Grid2(s, std::vector<double>(inst.v.data(), inst.v.data() + 4)), inst.tau, m, z, fft);
    return Vec(Eigen::Map<const Vec>(x.values.data(), 4));
  };
  auto r = [&](const Vec& x) {
    return mri_data_value(Grid2(s, std::vector<double>(x.data(), x.data() + 4)), fft, m, z);
  };
  return brute_prox_oracle("prox_mri_data", prox, r, detail::identity_projection, sample, trials, tolerance, seed);
}

}  // namespace bata::verify
