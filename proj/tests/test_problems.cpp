#include <sstream>

#include "bata/problems/deblur.hpp"
#include "bata/problems/mri.hpp"
#include "bata/verification/newton.hpp"
#include "helpers.hpp"

using namespace bata;
using bata::test::expect_error;

TEST(Images, SyntheticImagesInUnitRange) {
  for (const Grid2& g : {textured_image(32, 32, 2), shepp_logan_phantom(32, 32, 0), shepp_logan_phantom(32, 32, 3)}) {
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    EXPECT_GE(*lo, 0.0);
    EXPECT_LE(*hi, 1.0);
    EXPECT_GT(*hi - *lo, 0.3);
  }
  EXPECT_EQ((textured_image(16, 16, 5) - textured_image(16, 16, 5)).norm(), 0.0);
  EXPECT_GT((shepp_logan_phantom(16, 16, 0) - shepp_logan_phantom(16, 16, 1)).norm(), 0.0);
}

TEST(Deblur, NoiselessSimulationWithoutRotationIsTheModel) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.n1 = c.n2 = 16;
  c.noise_std = 0.0;
  c.rotation_deg = 0.0;
  const DeblurProblem p = build_deblur_problem(c);
  const HyperParams a{0.0, c.true_kernel.alpha2, c.true_kernel.alpha3, c.true_kernel.alpha4};
  EXPECT_LT((p.blur(p.truth()[0], a) - p.data()[0]).norm(), 1e-12);
  EXPECT_LT((conv_build(p.shape(), c.true_kernel).apply(p.truth()[0]) - p.data()[0]).norm(), 1e-12);
}

TEST(Deblur, RotatedSimulationStaysClose) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.noise_std = 0.0;
  const DeblurProblem p = build_deblur_problem(c);
  const HyperParams a{0.0, 0.15, 0.10, 0.75};
  const double rel = (p.blur(p.truth()[0], a) - p.data()[0]).norm() / p.data()[0].norm();
  EXPECT_LT(rel, 0.05);
  EXPECT_GT(rel, 0.0);
}

TEST(Deblur, NoiseLevel) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.rotation_deg = 0.0;
  const Grid2 b = textured_image(64, 64, 2);
  const Grid2 clean = simulate_deblur_data(b, c.true_kernel, 0.0, 1, 0.0);
  const Grid2 noisy = simulate_deblur_data(b, c.true_kernel, 0.02, 1, 0.0);
  const double sd = (noisy - clean).norm() / std::sqrt(64.0 * 64.0);
  EXPECT_NEAR(sd, 0.02, 0.002);
  expect_error([&] { simulate_deblur_data(b, c.true_kernel, -1.0, 1); }, ErrorCode::invalid_argument);
}

TEST(Deblur, LipschitzIsSquaredOperatorNorm) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.n1 = c.n2 = 16;
  const DeblurProblem p = build_deblur_problem(c);
  const HyperParams a{0.1, 0.5, -0.3, 0.6};
  const KernelParams k{0.5, -0.3, 0.6};
  const double est = operator_norm_sq_estimate(conv_build(p.shape(), k).as_operator(), Grid2(p.shape()), 500);
  EXPECT_NEAR(p.lipschitz_e(a), est, 1e-6 * est);
}

TEST(Deblur, ConfigOverrides) {
  std::istringstream in("sigma = 3e-4\nC = 0.2\nalpha0 = 0.04\ntheta_y = 0.05\nrotation_deg = 0\n");
  const auto kv = io::KeyValueConfig::parse(in);
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.apply(kv, Method::pdps_block_gs);
  EXPECT_DOUBLE_EQ(c.sigma(Method::pdps_block_gs), 3e-4);
  EXPECT_DOUBLE_EQ(c.sigma(Method::pdps_identity), 4e-5);
  EXPECT_DOUBLE_EQ(c.C, 0.2);
  EXPECT_DOUBLE_EQ(c.initial_alpha[0], 0.2);
  EXPECT_DOUBLE_EQ(c.pdps.block_theta_y, 0.05);
  EXPECT_DOUBLE_EQ(c.rotation_deg, 0.0);
  EXPECT_EQ(DeblurExperimentConfig::paper().n1, 128u);
}

TEST(Deblur, StepsValidatedAgainstKernel) {
  const DeblurProblem p = build_deblur_problem(DeblurExperimentConfig::desk());
  EXPECT_NO_THROW(p.steps(p.initial_alpha()));
  expect_error([&] { p.steps({0.1, 3.0, 0.0, 0.0}); }, ErrorCode::step_length_violation);
}

TEST(Mri, ProblemSetup) {
  const MriProblem p = build_mri_problem(MriExperimentConfig::desk());
  EXPECT_EQ(p.alpha_dim(), 16u);
  EXPECT_EQ(p.examples(), 4u);
  const HyperParams a = p.initial_alpha();
  double mass = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) mass += p.group_weights()[j] * a[j];
  EXPECT_NEAR(mass, 0.15, 1e-12);
  EXPECT_EQ(p.line_map().size(), 64u);
  EXPECT_NO_THROW(p.steps(a));
}

TEST(Mri, DataIsNoisySpectrum) {
  MriExperimentConfig c = MriExperimentConfig::desk();
  c.n1 = c.n2 = 16;
  c.groups = 4;
  c.training = 1;
  c.noise_std = 0.0;
  const MriProblem p = build_mri_problem(c);
  EXPECT_LT((Fft2(p.shape()).inverse_real(p.data()[0]) - p.truth()[0]).norm(), 1e-12);
}

TEST(Mri, GradientMatchesDataTermDifferences) {
  MriExperimentConfig c = MriExperimentConfig::desk();
  c.n1 = c.n2 = 8;
  c.groups = 4;
  c.training = 1;
  const MriProblem p = build_mri_problem(c);
  const HyperParams a{0.4, 0.1, 0.7, 0.2};
  std::mt19937_64 rng(3);
  const Grid2 x = test::random_grid(p.shape(), rng);
  const Grid2 g = p.grad_f(0, x, a);
  const Fft2 fft(p.shape());
  for (std::size_t k = 0; k < x.size(); k += 7) {
    Grid2 xp = x, xm = x;
    xp.values[k] += 1e-6;
    xm.values[k] -= 1e-6;
    const double fd = (mri_data_value(xp, fft, p.mask(a), p.data()[0]) - mri_data_value(xm, fft, p.mask(a), p.data()[0])) / 2e-6;
    EXPECT_NEAR(g.values[k], fd, 1e-6);
  }
  expect_error([&] { p.mask({1.0}); }, ErrorCode::dimension_mismatch);
}

TEST(Imaging, ExactInnerSolvesOptimality) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.n1 = c.n2 = 8;
  const DeblurProblem p = build_deblur_problem(c);
  const HyperParams a = p.initial_alpha();
  double res = 1.0;
  const ImagingState s = verify::exact_inner(p, a, 2000, nullptr, &res);
  EXPECT_LT(res, 1e-10);
  EXPECT_LT(p.optimality_residual(0, s.u[0], a).norm(), 1e-10);
}

TEST(Imaging, ImplicitSolveWarmStartsAndReports) {
  DeblurExperimentConfig c = DeblurExperimentConfig::desk();
  c.n1 = c.n2 = 16;
  const DeblurProblem p = build_deblur_problem(c);
  ImplicitOptions opt;
  opt.inner_steps = 4000;
  opt.inner_tolerance = 1e-8;
  opt.adjoint_steps = 5000;
  opt.adjoint_tolerance = 1e-4;
  const auto r = p.implicit_solve(p.initial_alpha(), nullptr, opt);
  EXPECT_TRUE(r.inner_converged);
  EXPECT_LE(r.adjoint_residual, 1e-4);
  EXPECT_GT(r.inner_residual, 0.0);
}
