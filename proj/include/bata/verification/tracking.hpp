#pragma once

#include <Eigen/Cholesky>

#include "bata/driver/bata.hpp"
#include "bata/verification/newton.hpp"

namespace bata::verify {

/// Dense Q = [[tau_x^{-1} I, -K*], [-K, (omega tau_y)^{-1} I]] on the flattened (x, y) ordering.
inline dense::Matrix dense_metric(const PdpsMetric& Q, Shape s) {
  const std::size_t n = 3 * s.pixels();
  require(n <= 10000, ErrorCode::invalid_argument, "dense_metric: desk scale only");
  dense::Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const PrimalDualState u = PrimalDualState::unflatten(s, e);
    Grid2 qx = (1.0 / Q.tau_x) * u.x;
    qx -= Q.K.adjoint(u.y);
    DualField qy = (1.0 / (Q.omega * Q.tau_y)) * u.y;
    qy -= Q.K(u.x);
    const auto col = PrimalDualState(std::move(qx), std::move(qy)).flatten();
    M.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const dense::Vector>(col.data(), static_cast<Eigen::Index>(n));
    e[c] = 0.0;
  }
  return M;
}

/// |p|_{Q^{-1}} for p in L(U; A): sqrt(sum_j p_j^T Q^{-1} p_j) over rows and examples.
class InverseMetricNorm {
 public:
  InverseMetricNorm(const PdpsMetric& Q, Shape s) : ldlt_(dense_metric(Q, s)) {
    require(ldlt_.info() == Eigen::Success && ldlt_.isPositive(), ErrorCode::not_positive_semidefinite,
            "Q is not positive definite; shrink tau_x tau_y");
  }

  double operator()(const std::vector<AdjointMatrix>& p) const {
    double acc = 0.0;
    for (const auto& m : p) {
      const dense::Matrix P = to_dense(m);
      for (Eigen::Index r = 0; r < P.rows(); ++r) {
        const dense::Vector v = P.row(r).transpose();
        acc += v.dot(ldlt_.solve(v));
      }
    }
    return std::sqrt(std::max(acc, 0.0));
  }

 private:
  Eigen::LDLT<dense::Matrix> ldlt_;
};

struct TrackingSample {
  long iter = 0;           // k: the sample compares step k -> k+1
  double inner_error = 0;  // |u^{k+1} - S_u(a^k)|_Q
  double adjoint_error = 0;  // |p^{k+1} - grad S_u(a^k)|_{Q^-1}
  double alpha_step = 0;   // |a^k - a^{k-1}|
  double inner_ratio = 0;
  double adjoint_ratio = 0;
};

struct TrackingReport {
  std::vector<TrackingSample> samples;
  std::vector<long> gaps;  // iterations whose reference solve did not converge

  double max_inner_ratio() const {
    double m = 0;
    for (const auto& s : samples) m = std::max(m, s.inner_ratio);
    return m;
  }
  double max_adjoint_ratio() const {
    double m = 0;
    for (const auto& s : samples) m = std::max(m, s.adjoint_ratio);
    return m;
  }
};

/// Runs `iterations` BATA steps from `start` and measures the empirical tracking ratios
///   |u^{k+1} - S_u(a^k)|_Q / (|u^k - S_u(a^{k-1})|_Q + |a^k - a^{k-1}|),
///   |p^{k+1} - grad S_u(a^k)|_{Q^-1}
///     / (|p^k - grad S_u(a^{k-1})|_{Q^-1} + |u^{k+1} - S_u(a^k)|_Q + |a^k - a^{k-1}|),
/// with exact references from dense Newton and LU solves. sigma = 0 keeps alpha fixed.
/// Diagnostic only; every reference costs a dense factorisation.
inline TrackingReport tracking_monitor(const PdpsImagingProblem& problem, Method method, double sigma,
                                       BataState<ImagingState> start, long iterations,
                                       double reference_tolerance = 1e-9) {
  require(sigma >= 0, ErrorCode::invalid_argument, "tracking_monitor: sigma must be nonnegative");
  require(method != Method::implicit, ErrorCode::invalid_argument, "tracking_monitor: single-loop methods only");
  const PdpsMetric Q = problem.metric();
  const InverseMetricNorm qinv(Q, problem.shape());
  const SplittingScheme scheme = problem.scheme(method);

  struct Reference {
    HyperParams alpha;
    ImagingState s;
    bool ok = false;
  };
  auto reference = [&](const HyperParams& a, const Reference* warm) {
    Reference r;
    r.alpha = a;
    double res = 0;
    r.s = exact_inner(problem, a, warm ? 200 : 3000, warm ? &warm->s : nullptr, &res);
    r.ok = res <= reference_tolerance;
    exact_adjoint(problem, r.s, a);
    return r;
  };
  auto inner_err = [&](const ImagingState& s, const Reference& r) {
    double acc = 0;
    for (std::size_t i = 0; i < problem.examples(); ++i) acc += std::pow(q_norm(s.u[i] - r.s.u[i], Q), 2);
    return std::sqrt(acc);
  };
  auto adjoint_err = [&](const ImagingState& s, const Reference& r) {
    std::vector<AdjointMatrix> d = s.p;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d[i].rows.size(); ++j) d[i].rows[j] -= r.s.p[i].rows[j];
    return qinv(d);
  };
  auto distance = [](const HyperParams& a, const HyperParams& b) {
    double acc = 0;
    for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(acc);
  };

  TrackingReport out;
  BataState<ImagingState> st = std::move(start);
  HyperParams prev_alpha = st.alpha;  // a^{-1} := a^0
  Reference prev_ref = reference(st.alpha, nullptr);
  double eu = inner_err(st.s, prev_ref), ep = adjoint_err(st.s, prev_ref);

  for (long k = 0; k < iterations; ++k) {
    const Reference ref = distance(st.alpha, prev_ref.alpha) == 0.0 ? prev_ref : reference(st.alpha, &prev_ref);
    problem.inner_step(st.s, st.alpha);
    problem.adjoint_step(st.s, st.alpha, scheme);

    TrackingSample t;
    t.iter = k;
    t.alpha_step = distance(st.alpha, prev_alpha);
    t.inner_error = inner_err(st.s, ref);
    t.adjoint_error = adjoint_err(st.s, ref);
    const double du = eu + t.alpha_step, dp = ep + t.inner_error + t.alpha_step;
    t.inner_ratio = du > 0 ? t.inner_error / du : 0.0;
    t.adjoint_ratio = dp > 0 ? t.adjoint_error / dp : 0.0;
    if (ref.ok)
      out.samples.push_back(t);
    else
      out.gaps.push_back(k);

    eu = t.inner_error;
    ep = t.adjoint_error;
    prev_alpha = st.alpha;
    prev_ref = ref;
    if (sigma > 0) {
      const HyperParams g = problem.hypergradient(st.s, st.alpha);
      HyperParams step = st.alpha;
      for (std::size_t j = 0; j < step.size(); ++j) step[j] -= sigma * g[j];
      st.alpha = problem.outer_prox(step, sigma);
    }
  }
  return out;
}

}  // namespace bata::verify
