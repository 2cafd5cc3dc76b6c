#pragma once

#include <optional>
#include <random>

#include "bata/adjoint/dense.hpp"
#include "bata/driver/method.hpp"
#include "bata/inner/forward_backward.hpp"

namespace bata {

struct QuadraticConfig {
  std::size_t outputs = 8;  // dim u
  std::size_t params = 3;   // dim alpha
  double inner_tau = 0.5;
  double identity_theta = 0.5;
  double sigma = 0.1;
  std::uint64_t seed = 0;
};

/// Toy bilevel problem: inner F(u; a) = 1/2 |u - B a|^2 (S_u(a) = B a), outer
/// J(u) = 1/2 |u - z|^2, R = 0, so a* solves the normal equations of 1/2 |B a - z|^2.
class QuadraticProblem {
 public:
  struct State {
    FlatField u;
    dense::Matrix p;  // row j: d u / d a_j
  };

  QuadraticProblem(dense::Matrix B, dense::Vector z, QuadraticConfig cfg = {})
      : B_(std::move(B)), z_(std::move(z)), cfg_(cfg) {
    require(B_.rows() == z_.size() && B_.cols() > 0, ErrorCode::dimension_mismatch, "quadratic: B and z disagree");
  }

  /// Random well-conditioned B (singular values in [1, 2]) and random z.
  static QuadraticProblem random(const QuadraticConfig& cfg) {
    require(cfg.outputs >= cfg.params && cfg.params > 0, ErrorCode::invalid_argument,
            "quadratic: need outputs >= params > 0");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> n;
    const auto m = static_cast<Eigen::Index>(cfg.outputs), k = static_cast<Eigen::Index>(cfg.params);
    auto gauss = [&](Eigen::Index r, Eigen::Index c) {
      dense::Matrix G(r, c);
      for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = n(rng);
      return G;
    };
    const dense::Matrix U = Eigen::HouseholderQR<dense::Matrix>(gauss(m, m)).householderQ();
    const dense::Matrix V = Eigen::HouseholderQR<dense::Matrix>(gauss(k, k)).householderQ();
    dense::Vector s(k);
    for (Eigen::Index i = 0; i < k; ++i) s[i] = 1.0 + (k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0);
    const dense::Matrix B = U.leftCols(k) * s.asDiagonal() * V.transpose();
    const dense::Vector z = gauss(m, 1).col(0);
    return QuadraticProblem(B, z, cfg);
  }

  const dense::Matrix& B() const { return B_; }
  const dense::Vector& z() const { return z_; }
  const QuadraticConfig& config() const { return cfg_; }
  std::size_t alpha_dim() const { return static_cast<std::size_t>(B_.cols()); }

  dense::Vector alpha_star() const { return B_.colPivHouseholderQr().solve(z_); }

  HyperParams initial_alpha() const { return HyperParams(alpha_dim(), 0.0); }

  State zero_state() const {
    return {FlatField(static_cast<std::size_t>(B_.rows())), dense::Matrix::Zero(B_.cols(), B_.rows())};
  }

  SplittingScheme scheme(Method m) const {
    switch (m) {
      case Method::pdps_block_gs: return SplittingScheme::gauss_seidel();
      case Method::pdps_identity: return SplittingScheme::identity(cfg_.identity_theta);
      case Method::implicit: return SplittingScheme::none();
    }
    return SplittingScheme::none();
  }

  void inner_step(State& s, const HyperParams& a) const {
    const ForwardBackwardStep step(cfg_.inner_tau, 1.0);
    const dense::Vector Ba = B_ * as_vector(a);
    s.u = fb_step<FlatField>(
        s.u, a,
        [&](const FlatField& u, const HyperParams&) {
          FlatField g(u);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] -= Ba[static_cast<Eigen::Index>(i)];
          return g;
        },
        {}, step);
  }

  /// grad_u G = I and -grad_a G = B, so row j of p solves p_j = B e_j.
  void adjoint_step(State& s, const HyperParams&, const SplittingScheme& scheme) const {
    const auto m = B_.rows();
    s.p = dense::splitting_step(s.p, dense::Matrix::Identity(m, m), B_.transpose(), scheme);
  }

  HyperParams hypergradient(const State& s, const HyperParams&) const {
    const dense::Vector g = s.p * (as_vector(s.u.values) - z_);
    return HyperParams(g.data(), g.data() + g.size());
  }

  HyperParams outer_prox(const HyperParams& a, double) const { return a; }

  double outer_value(const State& s, const HyperParams&) const {
    return 0.5 * (as_vector(s.u.values) - z_).squaredNorm();
  }

  ImplicitResult<State> implicit_solve(const HyperParams& a, const State* = nullptr,
                                       std::optional<ImplicitOptions> = std::nullopt) const {
    ImplicitResult<State> r;
    const dense::Vector u = B_ * as_vector(a);
    r.state.u = FlatField(std::vector<double>(u.data(), u.data() + u.size()));
    r.state.p = B_.transpose();
    return r;
  }

  double inner_distance_rel(const State& s, const State& ref) const {
    const double den = ref.u.norm();
    require(den > 0, ErrorCode::invalid_argument, "inner_distance_rel: zero reference");
    return (s.u - ref.u).norm() / den;
  }

  static dense::Vector as_vector(const std::vector<double>& v) {
    return Eigen::Map<const dense::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

 private:
  dense::Matrix B_;
  dense::Vector z_;
  QuadraticConfig cfg_;
};

}  // namespace bata
