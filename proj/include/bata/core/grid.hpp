#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "bata/core/error.hpp"

namespace bata {

/// Sequential left-to-right Euclidean pairing. The summation order is fixed
/// so results are bitwise reproducible.
inline double inner_product(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch,
          "inner_product: lengths " + std::to_string(a.size()) + " and " +
              std::to_string(b.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(inner_product(a, a)); }

// y += t * x
inline void axpy(double t, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), ErrorCode::dimension_mismatch, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += t * x[i];
}

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t pixels() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(Shape s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

namespace detail {

template <class Derived>
struct FieldOps {
  Derived& operator+=(const Derived& o) {
    auto& self = static_cast<Derived&>(*this);
    require(self.shape() == o.shape(), ErrorCode::dimension_mismatch, "field +=");
    for (std::size_t i = 0; i < self.values.size(); ++i) self.values[i] += o.values[i];
    return self;
  }
  Derived& operator-=(const Derived& o) {
    auto& self = static_cast<Derived&>(*this);
    require(self.shape() == o.shape(), ErrorCode::dimension_mismatch, "field -=");
    for (std::size_t i = 0; i < self.values.size(); ++i) self.values[i] -= o.values[i];
    return self;
  }
  Derived& operator*=(double t) {
    auto& self = static_cast<Derived&>(*this);
    for (double& v : self.values) v *= t;
    return self;
  }
  friend Derived operator+(Derived a, const Derived& b) { return a += b; }
  friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
  friend Derived operator*(double t, Derived a) { return a *= t; }

  double dot(const Derived& o) const {
    const auto& self = static_cast<const Derived&>(*this);
    require(self.shape() == o.shape(), ErrorCode::dimension_mismatch, "field dot");
    return inner_product(self.values, o.values);
  }
  double norm() const {
    const auto& self = static_cast<const Derived&>(*this);
    return norm2(self.values);
  }
  bool all_finite() const {
    const auto& self = static_cast<const Derived&>(*this);
    for (double v : self.values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

}  // namespace detail

/// Real n1 x n2 image, row-major with pixel index j = r * cols + c.
struct Grid2 : detail::FieldOps<Grid2> {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Grid2() = default;
  explicit Grid2(Shape s, double fill = 0.0) : rows(s.rows), cols(s.cols), values(s.pixels(), fill) {
    require(s.rows > 0 && s.cols > 0, ErrorCode::invalid_argument, "Grid2 needs positive dims");
  }
  Grid2(std::size_t n1, std::size_t n2, double fill = 0.0) : Grid2(Shape{n1, n2}, fill) {}
  Grid2(Shape s, std::vector<double> data) : rows(s.rows), cols(s.cols), values(std::move(data)) {
    require(s.rows > 0 && s.cols > 0, ErrorCode::invalid_argument, "Grid2 needs positive dims");
    require(values.size() == s.pixels(), ErrorCode::dimension_mismatch,
            "Grid2 data length does not match " + bata::to_string(s));
  }

  Shape shape() const { return {rows, cols}; }
  std::size_t size() const { return values.size(); }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Pixelwise 2-vector field y_j in R^2, stored interleaved: (y_j)_k at 2j + k.
/// Component 0 is the horizontal (column) direction, component 1 the vertical.
struct DualField : detail::FieldOps<DualField> {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DualField() = default;
  explicit DualField(Shape s, double fill = 0.0)
      : rows(s.rows), cols(s.cols), values(2 * s.pixels(), fill) {
    require(s.rows > 0 && s.cols > 0, ErrorCode::invalid_argument, "DualField needs positive dims");
  }
  DualField(Shape s, std::vector<double> data) : rows(s.rows), cols(s.cols), values(std::move(data)) {
    require(values.size() == 2 * s.pixels(), ErrorCode::dimension_mismatch,
            "DualField data length does not match 2*" + bata::to_string(s));
  }

  Shape shape() const { return {rows, cols}; }
  std::size_t pixels() const { return rows * cols; }
  double& at(std::size_t j, int k) { return values[2 * j + static_cast<std::size_t>(k)]; }
  double at(std::size_t j, int k) const { return values[2 * j + static_cast<std::size_t>(k)]; }
  double pixel_norm(std::size_t j) const { return std::hypot(values[2 * j], values[2 * j + 1]); }
};

/// Plain real vector with the same arithmetic as the image fields.
struct FlatField : detail::FieldOps<FlatField> {
  std::vector<double> values;

  FlatField() = default;
  explicit FlatField(std::size_t n, double fill = 0.0) : values(n, fill) {}
  explicit FlatField(std::vector<double> v) : values(std::move(v)) {}

  Shape shape() const { return {values.size(), 1}; }
  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Inner iterate u = (x, y).
struct PrimalDualState {
  Grid2 x;
  DualField y;

  PrimalDualState() = default;
  explicit PrimalDualState(Shape s) : x(s), y(s) {}
  PrimalDualState(Grid2 x_, DualField y_) : x(std::move(x_)), y(std::move(y_)) {
    require(x.shape() == y.shape(), ErrorCode::dimension_mismatch,
            "PrimalDualState: x and y grids differ");
  }

  Shape shape() const { return x.shape(); }
  std::size_t size() const { return x.size() + y.values.size(); }

  PrimalDualState& operator+=(const PrimalDualState& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  PrimalDualState& operator-=(const PrimalDualState& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  PrimalDualState& operator*=(double t) {
    x *= t;
    y *= t;
    return *this;
  }
  friend PrimalDualState operator+(PrimalDualState a, const PrimalDualState& b) { return a += b; }
  friend PrimalDualState operator-(PrimalDualState a, const PrimalDualState& b) { return a -= b; }
  friend PrimalDualState operator*(double t, PrimalDualState a) { return a *= t; }

  double dot(const PrimalDualState& o) const { return x.dot(o.x) + y.dot(o.y); }
  double norm() const { return std::sqrt(dot(*this)); }

  /// Flat (x, y) concatenation.
  std::vector<double> flatten() const {
    std::vector<double> out(x.values);
    out.insert(out.end(), y.values.begin(), y.values.end());
    return out;
  }
  static PrimalDualState unflatten(Shape s, std::span<const double> flat) {
    require(flat.size() == 3 * s.pixels(), ErrorCode::dimension_mismatch, "unflatten");
    PrimalDualState u(s);
    std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(s.pixels()), u.x.values.begin());
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(s.pixels()), flat.end(), u.y.values.begin());
    return u;
  }
};

/// Outer variable alpha.
using HyperParams = std::vector<double>;

}  // namespace bata
