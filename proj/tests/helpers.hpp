#pragma once

#include <gtest/gtest.h>

#include <random>

#include "bata/core/error.hpp"
#include "bata/core/grid.hpp"

namespace bata::test {

/// Runs `f` and checks that it throws bata::Error with `code`.
template <class F>
void expect_error(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

inline Grid2 random_grid(Shape s, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Grid2 g(s);
  for (double& v : g.values) v = n(rng);
  return g;
}

inline DualField random_dual(Shape s, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  DualField y(s);
  for (double& v : y.values) v = n(rng);
  return y;
}

}  // namespace bata::test
