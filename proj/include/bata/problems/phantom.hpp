#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "bata/core/grid.hpp"

namespace bata {

namespace detail {

struct Ellipse {
  double value, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan intensities (Toft), on [-1, 1]^2 with y pointing up.
inline constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

}  // namespace detail

/// Shepp-Logan-like head phantom in [0, 1]. `slice` picks a member of a family
/// of neighbouring "slices": the inner structures shrink, drift and fade slightly
/// with the slice index so that training images differ but share statistics.
inline Grid2 shepp_logan_phantom(std::size_t n1, std::size_t n2, int slice = 0) {
  Grid2 img(n1, n2);
  const double s = 0.06 * slice;
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c) {
      const double y = 1.0 - 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(n1);
      const double x = 2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(n2) - 1.0;
      double v = 0.0;
      for (std::size_t k = 0; k < detail::kSheppLogan.size(); ++k) {
        const auto& e = detail::kSheppLogan[k];
        const bool inner = k >= 2;
        const double scale = inner ? 1.0 - 0.5 * s : 1.0;
        const double y0 = inner ? e.y0 + 0.5 * s : e.y0;
        const double value = k >= 4 ? e.value * (1.0 + 2.0 * s) : e.value;
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0, dy = y - y0;
        const double u = (dx * std::cos(phi) + dy * std::sin(phi)) / (e.a * scale);
        const double w = (-dx * std::sin(phi) + dy * std::cos(phi)) / (e.b * scale);
        if (u * u + w * w <= 1.0) v += value;
      }
      img(r, c) = std::clamp(v, 0.0, 1.0);
    }
  return img;
}

/// Piecewise-smooth test image in [0, 1]: overlapping flat rectangles and discs on a
/// slowly shaded ramp. Periodic fine texture is avoided on purpose; a 5x5 blur erases it.
inline Grid2 textured_image(std::size_t n1, std::size_t n2, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Grid2 img(n1, n2);
  const double N1 = static_cast<double>(n1), N2 = static_cast<double>(n2);
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c) img(r, c) = 0.3 + 0.2 * static_cast<double>(c) / N2;
  // Slow shading, then rectangles and discs with random grey levels.
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c)
      img(r, c) += 0.08 * std::sin(2.0 * std::numbers::pi * (static_cast<double>(r) / N1 + 0.5 * static_cast<double>(c) / N2));
  for (int k = 0; k < 10; ++k) {
    const double r0 = U(rng) * N1, c0 = U(rng) * N2;
    const double h = (0.12 + 0.25 * U(rng)) * N1, w = (0.12 + 0.25 * U(rng)) * N2;
    const double level = 0.1 + 0.8 * U(rng);
    const bool disc = k % 2 == 1;
    for (std::size_t r = 0; r < n1; ++r)
      for (std::size_t c = 0; c < n2; ++c) {
        const double dr = (static_cast<double>(r) - r0) / h, dc = (static_cast<double>(c) - c0) / w;
        const bool in = disc ? dr * dr + dc * dc <= 0.25 : std::abs(dr) <= 0.5 && std::abs(dc) <= 0.5;
        if (in) img(r, c) = level;
      }
  }
  for (double& v : img.values) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace bata
