#pragma once

#include <cmath>
#include <numbers>

#include "bata/core/grid.hpp"

namespace bata {

/// How samples outside the grid are read.
enum class RotateBoundary { zero, periodic };

/// Rotates about the image centre by theta degrees, clockwise on screen (rows
/// pointing down) for theta > 0. Bilinear interpolation; samples outside the
/// grid read as zero by default, or wrap around.
inline Grid2 rotate(const Grid2& x, double theta_degrees, RotateBoundary boundary = RotateBoundary::zero) {
  if (theta_degrees == 0.0) return x;
  const double t = theta_degrees * std::numbers::pi / 180.0;
  const double ct = std::cos(t), st = std::sin(t);
  const double cr = (static_cast<double>(x.rows) - 1.0) / 2.0;
  const double cc = (static_cast<double>(x.cols) - 1.0) / 2.0;
  const auto n1 = static_cast<long>(x.rows), n2 = static_cast<long>(x.cols);
  auto at = [&](long r, long c) {
    if (boundary == RotateBoundary::periodic) {
      r = ((r % n1) + n1) % n1;
      c = ((c % n2) + n2) % n2;
    } else if (r < 0 || c < 0 || r >= n1 || c >= n2) {
      return 0.0;
    }
    return x(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };
  Grid2 out(x.shape());
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      const double dx = static_cast<double>(c) - cc;
      const double dy = static_cast<double>(r) - cr;
      const double sx = cc + dx * ct + dy * st;
      const double sy = cr - dx * st + dy * ct;
      const double fx = std::floor(sx), fy = std::floor(sy);
      const double wx = sx - fx, wy = sy - fy;
      const long c0 = static_cast<long>(fx), r0 = static_cast<long>(fy);
      out(r, c) = (1 - wy) * ((1 - wx) * at(r0, c0) + wx * at(r0, c0 + 1)) +
                  wy * ((1 - wx) * at(r0 + 1, c0) + wx * at(r0 + 1, c0 + 1));
    }
  }
  return out;
}

}  // namespace bata
