#pragma once

#include <functional>

#include "bata/core/grid.hpp"

namespace bata::verify {

struct FdGradient {
  HyperParams gradient;
  bool inconclusive = false;  // an inner solve missed its tolerance
};

/// Central differences of a -> J(S_u(a)). `reduced` returns J at the exact inner
/// solution and reports whether that solve met its tolerance.
inline FdGradient fd_hypergradient(const std::function<double(const HyperParams&, bool&)>& reduced,
                                   const HyperParams& alpha, double h) {
  FdGradient out;
  out.gradient.resize(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    HyperParams ap = alpha, am = alpha;
    ap[j] += h;
    am[j] -= h;
    bool okp = true, okm = true;
    const double jp = reduced(ap, okp), jm = reduced(am, okm);
    out.inconclusive = out.inconclusive || !okp || !okm;
    out.gradient[j] = (jp - jm) / (2.0 * h);
  }
  return out;
}

}  // namespace bata::verify
