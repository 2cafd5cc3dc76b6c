#include <sstream>

#include "bata/problems/deblur.hpp"
#include "bata/problems/mri.hpp"
#include "bata/problems/quadratic.hpp"
#include "bata/verification/derivatives.hpp"
#include "bata/verification/fd_hypergradient.hpp"
#include "bata/verification/newton.hpp"
#include "bata/verification/three_point.hpp"
#include "bata/verification/tracking.hpp"
#include "helpers.hpp"

using namespace bata;

namespace {

DeblurProblem small_deblur() {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.n1 = c.n2 = 8;
  return build_deblur_problem(c);
}

MriProblem small_mri() {
  MriExperimentConfig c = MriExperimentConfig::desk();
  c.n1 = c.n2 = 8;
  c.groups = 4;
  c.training = 2;
  return build_mri_problem(c);
}

double max_rel(const HyperParams& a, const HyperParams& b) {
  double num = 0, den = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num = std::max(num, std::abs(a[j] - b[j]));
    den = std::max(den, std::abs(b[j]));
  }
  return num / den;
}

}  // namespace

TEST(Report, CsvRow) {
  verify::OracleReport r{"x", 1e-7, 3, false, 1e-6};
  r.finalize();
  EXPECT_TRUE(r.pass);
  std::ostringstream out;
  verify::OracleReport::write_csv_header(out);
  r.write_csv_row(out);
  EXPECT_EQ(out.str(), "name,max_rel_error,instances,pass,tolerance\nx,1e-07,3,1,1e-06\n");
}

TEST(FdHypergradient, QuadraticClosedForm) {
  QuadraticConfig c;
  const QuadraticProblem p = QuadraticProblem::random(c);
  const HyperParams a{0.3, -0.2, 0.5};
  auto reduced = [&](const HyperParams& b, bool& ok) {
    ok = true;
    return p.outer_value(p.implicit_solve(b).state, b);
  };
  const auto fd = verify::fd_hypergradient(reduced, a, 1e-5);
  const dense::Vector g = p.B().transpose() * (p.B() * QuadraticProblem::as_vector(a) - p.z());
  for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(fd.gradient[j], g[static_cast<Eigen::Index>(j)], 1e-8);
  const dense::Vector star = p.alpha_star();
  const auto at_star = verify::fd_hypergradient(reduced, HyperParams(star.data(), star.data() + star.size()), 1e-5);
  EXPECT_LT(QuadraticProblem::as_vector(at_star.gradient).norm(), 1e-6);
}

template <class P>
static void check_hypergradient(const P& prob, const HyperParams& a) {
  double res = 1;
  ImagingState s = verify::exact_inner(prob, a, 3000, nullptr, &res);
  ASSERT_LT(res, 1e-10);
  verify::exact_adjoint(prob, s, a);
  const HyperParams g = prob.hypergradient(s, a);
  const auto fd = verify::fd_hypergradient(
      [&](const HyperParams& b, bool& ok) {
        double r = 1;
        const ImagingState t = verify::exact_inner(prob, b, 0, &s, &r);
        ok = r < 1e-10;
        return prob.outer_data(t);
      },
      a, 1e-5);
  EXPECT_FALSE(fd.inconclusive);
  EXPECT_LT(max_rel(g, fd.gradient), 1e-4);
}

TEST(FdHypergradient, DeblurAdjointAgrees) { check_hypergradient(small_deblur(), {0.3, 0.3, 0.2, 0.5}); }

TEST(FdHypergradient, MriAdjointAgrees) { check_hypergradient(small_mri(), {0.5, 0.3, 0.2, 0.4}); }

TEST(MixedDerivatives, BothExperiments) {
  const auto d = verify::mixed_derivative_check("deblur", small_deblur(), {0.3, 0.3, 0.2, 0.5}, 5);
  EXPECT_TRUE(d.pass) << d.max_rel_error;
  const auto m = verify::mixed_derivative_check("mri", small_mri(), {0.5, 0.3, 0.2, 0.4}, 5);
  EXPECT_TRUE(m.pass) << m.max_rel_error;
}

TEST(ThreePoint, NoViolations) {
  const auto r = verify::three_point_monotonicity_check(2000, 3);
  EXPECT_EQ(r.violations, 0);
  EXPECT_TRUE(r.report.pass);
}

TEST(ThreePoint, ReducesToStrongMonotonicityAndSmallT) {
  std::mt19937_64 rng(4);
  const dense::Matrix H = 2.0 * dense::Matrix::Identity(3, 3);
  const dense::Vector x = dense::Vector::Random(3), xh = dense::Vector::Random(3);
  // z = x: <H(x - xh), x - xh> >= (gamma - tL) |x - xh|^2
  EXPECT_GE(verify::three_point_margin(H, 2.0, 2.0, x, x, xh, 0.5), 0.0);
  const dense::Vector z = dense::Vector::Random(3);
  EXPECT_GE(verify::three_point_margin(H, 2.0, 2.0, x, z, xh, 1e-3), 0.0);
}

TEST(Tracking, FixedAlphaContracts) {
  const DeblurProblem prob = small_deblur();
  BataState<ImagingState> st;
  st.alpha = prob.initial_alpha();
  st.s = prob.zero_state();
  const auto rep = verify::tracking_monitor(prob, Method::pdps_block_gs, 0.0, st, 40);
  ASSERT_EQ(rep.samples.size(), 40u);
  EXPECT_TRUE(rep.gaps.empty());
  EXPECT_LT(rep.max_inner_ratio(), 1.0);
  // single adjoint steps may overshoot in the Q^-1 norm; on average they contract
  double log_mean = 0;
  for (const auto& t : rep.samples) log_mean += std::log(t.adjoint_ratio) / 40.0;
  EXPECT_LT(log_mean, std::log(0.95));
  EXPECT_LT(rep.samples.back().adjoint_error, 0.1 * rep.samples.front().adjoint_error);
}
