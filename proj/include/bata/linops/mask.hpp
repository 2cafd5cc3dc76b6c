#pragma once

#include <cstddef>
#include <vector>

#include "bata/linops/fft2.hpp"

namespace bata {

/// Line-wise k-space weighting: row r of a spectrum is scaled by weights[line_map[r]].
struct MaskParams {
  std::vector<double> weights;
  std::vector<std::size_t> line_map;

  std::size_t groups() const { return weights.size(); }
  double row_weight(std::size_t r) const { return weights[line_map[r]]; }
};

/// Signed-frequency distance of row r from the zero-frequency row in the
/// unshifted FFT layout.
inline std::size_t row_frequency(std::size_t r, std::size_t n1) { return std::min(r, n1 - r); }

/// Groups rows symmetrically about the zero-frequency line. Group 0 is the DC line;
/// for even n1 the last group is the Nyquist line alone; the +-k line pairs in
/// between are split into contiguous frequency bands of (nearly) equal size.
/// Groups are ordered from low to high frequency.
inline std::vector<std::size_t> symmetric_line_map(std::size_t n1, std::size_t groups) {
  require(n1 >= 2, ErrorCode::invalid_argument, "line map needs at least two rows");
  const bool has_nyquist = n1 % 2 == 0;
  const std::size_t pairs = has_nyquist ? n1 / 2 - 1 : (n1 - 1) / 2;
  const std::size_t reserved = has_nyquist ? 2 : 1;
  require(groups > reserved && groups - reserved <= pairs, ErrorCode::invalid_argument,
          "line map: " + std::to_string(groups) + " groups do not fit " + std::to_string(n1) + " rows");
  const std::size_t pair_groups = groups - reserved;
  std::vector<std::size_t> map(n1);
  for (std::size_t r = 0; r < n1; ++r) {
    const std::size_t k = row_frequency(r, n1);
    if (k == 0)
      map[r] = 0;
    else if (has_nyquist && k == n1 / 2)
      map[r] = groups - 1;
    else
      map[r] = 1 + (k - 1) * pair_groups / pairs;
  }
  return map;
}

/// Lines per group divided by the number of rows, so the entries sum to one.
inline std::vector<double> line_group_weights(const std::vector<std::size_t>& line_map, std::size_t groups) {
  std::vector<double> w(groups, 0.0);
  for (std::size_t g : line_map) {
    require(g < groups, ErrorCode::invalid_argument, "line map refers to a missing group");
    w[g] += 1.0;
  }
  for (double& v : w) {
    require(v > 0.0, ErrorCode::invalid_argument, "line map leaves a group empty");
    v /= static_cast<double>(line_map.size());
  }
  return w;
}

inline void check_mask(const MaskParams& m, Shape s) {
  require(m.line_map.size() == s.rows, ErrorCode::invalid_argument,
          "mask line map covers " + std::to_string(m.line_map.size()) + " rows, spectrum has " +
              std::to_string(s.rows));
  for (std::size_t g : m.line_map)
    require(g < m.weights.size(), ErrorCode::invalid_argument, "mask row assigned to a missing group");
}

inline ComplexField mask_apply(const MaskParams& m, ComplexField z) {
  check_mask(m, z.shape());
  for (std::size_t r = 0; r < z.rows; ++r) {
    const double t = m.row_weight(r);
    for (std::size_t c = 0; c < z.cols; ++c) z(r, c) *= t;
  }
  return z;
}

}  // namespace bata
