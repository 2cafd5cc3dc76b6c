#pragma once

#include <string>
#include <string_view>

#include "bata/core/error.hpp"

namespace bata {

enum class Method { pdps_block_gs, pdps_identity, implicit };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::pdps_block_gs: return "pdps-block-gs";
    case Method::pdps_identity: return "pdps-identity";
    case Method::implicit: return "implicit";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "pdps-block-gs") return Method::pdps_block_gs;
  if (s == "pdps-identity") return Method::pdps_identity;
  if (s == "implicit") return Method::implicit;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(s) + "'");
}

/// Iteration caps for solving the inner problem and the adjoint equation "exactly".
/// A nonpositive tolerance runs the full cap.
struct ImplicitOptions {
  int inner_steps = 3000;
  double inner_tolerance = 0.0;
  int adjoint_steps = 200;
  double adjoint_tolerance = 0.0;
};

template <class State>
struct ImplicitResult {
  State state;
  bool inner_converged = true;
  bool adjoint_converged = true;
  double inner_residual = 0.0;    // relative fixed-point residual of the last inner step
  double adjoint_residual = 0.0;  // max over rows of |A p - b| / |b|
};

}  // namespace bata
