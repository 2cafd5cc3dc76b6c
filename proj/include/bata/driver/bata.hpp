#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>

#include "bata/adjoint/scheme.hpp"
#include "bata/driver/method.hpp"

namespace bata {

/// What the driver needs from a bilevel problem.
template <class P>
concept BilevelProblem = requires(const P& p, typename P::State& s, const typename P::State& cs,
                                  const HyperParams& a, double sigma, Method m) {
  { p.initial_alpha() } -> std::convertible_to<HyperParams>;
  { p.scheme(m) } -> std::convertible_to<SplittingScheme>;
  p.inner_step(s, a);
  p.adjoint_step(s, a, p.scheme(m));
  { p.hypergradient(cs, a) } -> std::convertible_to<HyperParams>;
  { p.outer_prox(a, sigma) } -> std::convertible_to<HyperParams>;
  { p.outer_value(cs, a) } -> std::convertible_to<double>;
  { p.implicit_solve(a, &cs) } -> std::convertible_to<ImplicitResult<typename P::State>>;
  { p.inner_distance_rel(cs, cs) } -> std::convertible_to<double>;
};

struct RunConfig {
  double sigma = 1e-4;
  Method method = Method::pdps_block_gs;
  std::optional<double> budget_seconds;  // process CPU time
  std::optional<long> max_iterations;
  long log_every = 1;
  std::uint64_t seed = 0;

  void validate() const {
    require(sigma > 0 && std::isfinite(sigma), ErrorCode::invalid_argument, "sigma must be positive");
    require(budget_seconds || max_iterations, ErrorCode::budget_invalid, "a CPU-time or iteration budget is required");
    if (budget_seconds)
      require(*budget_seconds > 0, ErrorCode::budget_invalid, "CPU-time budget must be positive");
    if (max_iterations)
      require(*max_iterations >= 0, ErrorCode::budget_invalid, "iteration budget must be nonnegative");
    require(log_every > 0, ErrorCode::invalid_argument, "log_every must be positive");
  }
};

/// Reference solution estimates for the relative-error columns.
template <class State>
struct RunReference {
  std::optional<HyperParams> alpha;
  std::optional<State> state;
};

struct LogRecord {
  long iter = 0;
  double cputime = 0.0;
  double walltime = 0.0;
  double objective = 0.0;  // J(u) + R(alpha) with the current inner iterate
  double alpha_diff = std::numeric_limits<double>::quiet_NaN();
  double u_diff = std::numeric_limits<double>::quiet_NaN();
  HyperParams alpha;
};

struct IterateLog {
  std::vector<LogRecord> records;
  std::string error;  // set when a step failed; records up to the failure are kept

  bool aborted() const { return !error.empty(); }

  void write_csv(std::ostream& out) const {
    const std::size_t n = records.empty() ? 0 : records.front().alpha.size();
    out << "iter,cputime,JplusR,alphaDiff,u_tilde_diff";
    for (std::size_t j = 1; j <= n; ++j) out << ",alpha" << j;
    out << '\n' << std::setprecision(17);
    for (const auto& r : records) {
      out << r.iter << ',' << r.cputime << ',' << r.objective << ',' << r.alpha_diff << ',' << r.u_diff;
      for (double a : r.alpha) out << ',' << a;
      out << '\n';
    }
  }

  void write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
    write_csv(out);
  }
};

template <class State>
struct BataState {
  State s;
  HyperParams alpha;
};

template <class State>
struct RunResult {
  IterateLog log;
  BataState<State> final;
};

inline double process_cpu_seconds() { return static_cast<double>(std::clock()) / CLOCKS_PER_SEC; }

/// |a - ref| / |ref|.
inline double alpha_relative_error(const HyperParams& a, const HyperParams& ref) {
  require(a.size() == ref.size(), ErrorCode::dimension_mismatch, "alpha and reference differ in length");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ref[i]) * (a[i] - ref[i]);
    den += ref[i] * ref[i];
  }
  require(den > 0, ErrorCode::invalid_argument, "reference alpha is zero");
  return std::sqrt(num / den);
}

/// (e_alpha, e_u) against a reference; e_u uses the problem's inner metric.
template <BilevelProblem P>
std::pair<double, double> relative_errors(const P& problem, const BataState<typename P::State>& st,
                                          const RunReference<typename P::State>& ref) {
  const double ea = ref.alpha ? alpha_relative_error(st.alpha, *ref.alpha) : std::numeric_limits<double>::quiet_NaN();
  const double eu = ref.state ? problem.inner_distance_rel(st.s, *ref.state) : std::numeric_limits<double>::quiet_NaN();
  return {ea, eu};
}

/// Single-loop iteration: one inner step, one adjoint step at the new inner iterate
/// and the current alpha, then a proximal gradient step on alpha. The implicit method
/// instead re-solves both subproblems before the outer step.
template <BilevelProblem P>
BataState<typename P::State> bata_iteration(BataState<typename P::State> st, const P& problem, const RunConfig& cfg) {
  if (cfg.method == Method::implicit) {
    st.s = problem.implicit_solve(st.alpha, &st.s).state;
  } else {
    problem.inner_step(st.s, st.alpha);
    problem.adjoint_step(st.s, st.alpha, problem.scheme(cfg.method));
  }
  const HyperParams g = problem.hypergradient(st.s, st.alpha);
  HyperParams step = st.alpha;
  for (std::size_t j = 0; j < step.size(); ++j) step[j] -= cfg.sigma * g[j];
  st.alpha = problem.outer_prox(step, cfg.sigma);
  return st;
}

/// Initialises by an implicit solve at alpha0 (unless `start` is given) and iterates
/// until the budget is spent. Step errors end the run with the partial log kept.
template <BilevelProblem P>
RunResult<typename P::State> run(const P& problem, const RunConfig& cfg,
                                 const RunReference<typename P::State>& ref = {},
                                 std::optional<BataState<typename P::State>> start = std::nullopt) {
  cfg.validate();
  using State = typename P::State;
  RunResult<State> out;
  BataState<State>& st = out.final;
  if (start) {
    st = std::move(*start);
  } else {
    st.alpha = problem.initial_alpha();
    st.s = problem.implicit_solve(st.alpha).state;
  }

  const double cpu0 = process_cpu_seconds();
  const auto wall0 = std::chrono::steady_clock::now();
  auto record = [&](long k) {
    LogRecord r;
    r.iter = k;
    r.cputime = process_cpu_seconds() - cpu0;
    r.walltime = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    r.objective = problem.outer_value(st.s, st.alpha);
    std::tie(r.alpha_diff, r.u_diff) = relative_errors(problem, st, ref);
    r.alpha = st.alpha;
    if (!out.log.records.empty()) r.cputime = std::max(r.cputime, out.log.records.back().cputime);
    out.log.records.push_back(std::move(r));
  };

  record(0);
  long k = 0;
  auto budget_left = [&] {
    if (cfg.max_iterations && k >= *cfg.max_iterations) return false;
    if (cfg.budget_seconds && process_cpu_seconds() - cpu0 >= *cfg.budget_seconds) return false;
    return true;
  };
  try {
    while (budget_left()) {
      st = bata_iteration(st, problem, cfg);  // by copy: a throwing step leaves st intact
      ++k;
      if (k % cfg.log_every == 0) record(k);
    }
    if (out.log.records.back().iter != k) record(k);
  } catch (const Error& e) {
    out.log.error = "iteration " + std::to_string(k + 1) + ": " + e.what();
  }
  return out;
}

}  // namespace bata
