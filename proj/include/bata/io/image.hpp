#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bata/core/error.hpp"
#include "bata/core/grid.hpp"

namespace bata::io {

namespace detail {

inline std::string next_pgm_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw Error(ErrorCode::io_failure, "PGM: truncated header");
}

}  // namespace detail

/// Binary PGM (P5), 8- or 16-bit (big-endian). Values are divided by maxval.
inline Grid2 read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path.string());
  require(detail::next_pgm_token(in) == "P5", ErrorCode::io_failure, path.string() + ": not a binary PGM (P5)");
  const auto width = std::stoul(detail::next_pgm_token(in));
  const auto height = std::stoul(detail::next_pgm_token(in));
  const auto maxval = std::stoul(detail::next_pgm_token(in));
  require(width > 0 && height > 0 && maxval > 0 && maxval < 65536, ErrorCode::io_failure,
          path.string() + ": bad PGM header");
  in.get();  // single whitespace before the raster
  Grid2 img(height, width);
  const bool wide = maxval > 255;
  for (double& v : img.values) {
    unsigned value = static_cast<unsigned char>(in.get());
    if (wide) value = (value << 8) | static_cast<unsigned char>(in.get());
    v = static_cast<double>(value) / static_cast<double>(maxval);
  }
  require(static_cast<bool>(in), ErrorCode::io_failure, path.string() + ": truncated raster");
  return img;
}

/// Writes values clamped to [0, 1] as a 16-bit P5 file.
inline void write_pgm(const std::filesystem::path& path, const Grid2& img) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
  out << "P5\n" << img.cols << ' ' << img.rows << "\n65535\n";
  for (double v : img.values) {
    const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.put(static_cast<char>(q >> 8));
    out.put(static_cast<char>(q & 0xff));
  }
}

/// Plain CSV matrix (comma or whitespace separated), one image row per line.
inline Grid2 read_csv_image(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path.string());
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::size_t n = 0;
    double v;
    while (ls >> v) {
      values.push_back(v);
      ++n;
    }
    if (n == 0) continue;
    require(cols == 0 || n == cols, ErrorCode::io_failure, path.string() + ": ragged CSV rows");
    cols = n;
    ++rows;
  }
  require(rows > 0, ErrorCode::io_failure, path.string() + ": empty CSV image");
  return Grid2(Shape{rows, cols}, std::move(values));
}

/// Rescales to [0, 1] (constant images map to zero).
inline Grid2 rescale_unit(Grid2 img) {
  const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
  const double a = *lo, span = *hi - *lo;
  for (double& v : img.values) v = span > 0 ? (v - a) / span : 0.0;
  return img;
}

/// PGM or CSV by extension, rescaled to [0, 1].
inline Grid2 load_image(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm") return rescale_unit(read_pgm(path));
  if (ext == ".csv" || ext == ".txt") return rescale_unit(read_csv_image(path));
  throw Error(ErrorCode::io_failure, path.string() + ": expected a .pgm or .csv image");
}

/// Top-left aligned crop centred in the source image.
inline Grid2 center_crop(const Grid2& img, std::size_t n1, std::size_t n2) {
  require(n1 <= img.rows && n2 <= img.cols, ErrorCode::invalid_argument,
          "crop " + std::to_string(n1) + "x" + std::to_string(n2) + " exceeds the source image");
  const std::size_t r0 = (img.rows - n1) / 2, c0 = (img.cols - n2) / 2;
  Grid2 out(n1, n2);
  for (std::size_t r = 0; r < n1; ++r)
    for (std::size_t c = 0; c < n2; ++c) out(r, c) = img(r0 + r, c0 + c);
  return out;
}

}  // namespace bata::io
