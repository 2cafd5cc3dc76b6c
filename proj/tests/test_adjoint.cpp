#include "bata/adjoint/dense.hpp"
#include "bata/adjoint/pdps_system.hpp"
#include "bata/problems/deblur.hpp"
#include "bata/problems/mri.hpp"
#include "bata/verification/newton.hpp"
#include "helpers.hpp"

using namespace bata;
using bata::test::expect_error;
using dense::Matrix;
using dense::Vector;

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix G(r, c);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = n(rng);
  return G;
}

/// SPD with spectrum in [gamma, L] (both attained).
Matrix random_spd(Eigen::Index d, double gamma, double L, std::mt19937_64& rng) {
  const Matrix V = Eigen::HouseholderQR<Matrix>(gaussian(d, d, rng)).householderQ();
  std::uniform_real_distribution<double> u(gamma, L);
  Vector lam(d);
  for (Eigen::Index i = 0; i < d; ++i) lam[i] = u(rng);
  lam[0] = gamma;
  lam[d - 1] = L;
  return V * lam.asDiagonal() * V.transpose();
}

double exact_norm(const Matrix& B) { return Eigen::JacobiSVD<Matrix>(B).singularValues()(0); }

}  // namespace

TEST(DenseSplitting, IdentityOnIdentityMatrixIsExact) {
  const Matrix A = Matrix::Identity(5, 5);
  const SplitReport rep = dense::check_split_condition(A, SplittingScheme::identity(1.0));
  EXPECT_NEAR(rep.zeta_est, 0.0, 1e-15);
  EXPECT_TRUE(rep.admissible);
}

TEST(DenseSplitting, IdentityContractionBound) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const double gamma = 0.5 + t * 0.05, L = 2.0 + t * 0.1;
    const Matrix A = random_spd(6, gamma, L, rng);
    const double theta = gamma / (L * L);
    const SplitReport rep = dense::check_split_condition(A, SplittingScheme::identity(theta));
    const dense::Split sp = dense::split(A, SplittingScheme::identity(theta));
    const double truth = exact_norm(sp.N.inverse() * sp.M);
    EXPECT_NEAR(rep.zeta_est, truth, 1e-4 * truth);
    EXPECT_LE(rep.zeta_est, std::sqrt(1 + theta * theta * L * L - 2 * theta * gamma) * 1.05);
  }
}

TEST(DenseSplitting, JacobiAndGaussSeidelStepRatios) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index d = 8;
    Matrix A = 0.1 * gaussian(d, d, rng);
    A = 0.5 * (A + A.transpose()).eval();
    A.diagonal().array() += 3.0;  // SPD and strictly diagonally dominant
    const Matrix B = gaussian(2, d, rng);
    const Matrix P_star = (A.partialPivLu().solve(B.transpose())).transpose();
    for (const SplittingScheme s : {SplittingScheme::jacobi(), SplittingScheme::gauss_seidel()}) {
      const SplitReport rep = dense::check_split_condition(A, s);
      ASSERT_TRUE(rep.admissible);
      Matrix P = gaussian(2, d, rng);
      for (int k = 0; k < 5; ++k) {
        const Matrix next = dense::splitting_step(P, A, B, s);
        EXPECT_LE((next - P_star).norm(), (rep.zeta_est + 1e-6) * (P - P_star).norm());
        P = next;
      }
    }
  }
}

TEST(DenseSplitting, BlockGaussSeidelSimplifiedCondition) {
  std::mt19937_64 rng(3);
  int tested = 0;
  for (int t = 0; t < 50 && tested < 20; ++t) {
    const Eigen::Index k = 4, n = 7;
    Matrix A = gaussian(n, n, rng);
    A.topLeftCorner(k, k) = random_spd(k, 1.0, 3.0, rng);
    A.bottomRightCorner(n - k, n - k) = random_spd(n - k, 1.0, 3.0, rng);
    A.topRightCorner(k, n - k) *= 0.3;
    const Matrix A11 = A.topLeftCorner(k, k), A12 = A.topRightCorner(k, n - k);
    const Matrix A21 = A.bottomLeftCorner(n - k, k), A22 = A.bottomRightCorner(n - k, n - k);
    const Matrix E = A11.inverse() * A12;
    const double zeta = std::sqrt(std::pow(exact_norm(A22.inverse() * A21 * E), 2) + std::pow(exact_norm(E), 2));
    if (zeta >= 1.0) continue;
    ++tested;
    const SplittingScheme s = SplittingScheme::dense_block_gs(static_cast<std::size_t>(k));
    const Matrix B = gaussian(1, n, rng);
    const Matrix P_star = A.partialPivLu().solve(B.transpose()).transpose();
    Matrix P = gaussian(1, n, rng);
    for (int it = 0; it < 5; ++it) {
      const Matrix next = dense::splitting_step(P, A, B, s);
      EXPECT_LE((next - P_star).norm(), zeta * (P - P_star).norm() * (1 + 1e-10));
      P = next;
    }
    const SplitReport rep = dense::check_split_condition(A, s);
    const dense::Split sp = dense::split(A, s);
    EXPECT_LE(rep.gamma_n_est * exact_norm(sp.N.inverse()), 1 + 1e-6);
  }
  EXPECT_GE(tested, 5);
}

TEST(DenseSplitting, Errors) {
  Matrix A = Matrix::Identity(3, 3);
  A(1, 1) = 0.0;
  expect_error([&] { dense::split(A, SplittingScheme::jacobi()); }, ErrorCode::singular_system);
  expect_error([&] { dense::split(Matrix::Zero(2, 3), SplittingScheme::identity(1.0)); },
               ErrorCode::dimension_mismatch);
  expect_error([&] { dense::split(A, SplittingScheme::dense_block_gs(0)); }, ErrorCode::invalid_argument);
  expect_error([] { SplittingScheme::identity(0.0); }, ErrorCode::invalid_argument);
}

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

double relative_gap(const AdjointMatrix& p, const AdjointMatrix& q) {
  return (to_dense(p) - to_dense(q)).norm() / to_dense(q).norm();
}

}  // namespace

TEST(Gmres, MatchesDenseSolveAcrossRestarts) {
  std::mt19937_64 rng(9);
  const Shape sh{5, 6};
  const Matrix A = gaussian(30, 30, rng) + 8.0 * Matrix::Identity(30, 30);
  const std::function<Grid2(const Grid2&)> op = [&](const Grid2& v) {
    Grid2 out(sh);
    Eigen::Map<Vector>(out.values.data(), 30) = A * Eigen::Map<const Vector>(v.values.data(), 30);
    return out;
  };
  const Grid2 b = test::random_grid(sh, rng);
  const Vector truth = A.partialPivLu().solve(Eigen::Map<const Vector>(b.values.data(), 30));
  for (int restart : {5, 60}) {
    Grid2 x(sh);
    const KrylovResult r = gmres<Grid2>(op, b, x, 1e-12, 500, restart);
    EXPECT_TRUE(r.converged);
    EXPECT_LT((Eigen::Map<const Vector>(x.values.data(), 30) - truth).norm(), 1e-10 * truth.norm());
  }
  Grid2 y(sh);
  const KrylovResult capped = gmres<Grid2>(op, b, y, 1e-12, 3);
  EXPECT_FALSE(capped.converged);
  EXPECT_EQ(capped.iterations, 3);
  EXPECT_LT(capped.relative_residual, 1.0);
  Grid2 z = b;
  EXPECT_TRUE(gmres<Grid2>(op, Grid2(sh), z, 1e-12, 3).converged);
  EXPECT_EQ(z.norm(), 0.0);
}

TEST(PdpsAdjoint, StructuredApplyMatchesDenseAssembly) {
  const DeblurProblem prob = small_deblur();
  const HyperParams a{0.3, 0.3, 0.2, 0.5};
  ImagingState s = verify::exact_inner(prob, a, 500);
  const PdpsAdjointSystem sys = prob.adjoint_system(0, s.u[0], a);
  const Matrix A = to_dense(sys);
  std::mt19937_64 rng(4);
  const PrimalDualState v(test::random_grid(prob.shape(), rng), test::random_dual(prob.shape(), rng));
  const auto av = sys.apply(v).flatten(), vf = v.flatten();
  const Vector dense_av = A * Eigen::Map<const Vector>(vf.data(), static_cast<Eigen::Index>(vf.size()));
  for (std::size_t i = 0; i < av.size(); ++i) EXPECT_NEAR(av[i], dense_av[static_cast<Eigen::Index>(i)], 1e-10);
}

TEST(PdpsAdjoint, BlockGaussSeidelReachesDirectSolve) {
  const DeblurProblem prob = small_deblur();
  const HyperParams a{0.3, 0.3, 0.2, 0.5};
  ImagingState s = verify::exact_inner(prob, a, 2000);
  ImagingState direct = s;
  verify::exact_adjoint(prob, direct, a);
  const PdpsAdjointSystem sys = prob.adjoint_system(0, s.u[0], a);
  const SplittingScheme gs = prob.scheme(Method::pdps_block_gs);
  AdjointMatrix p(sys.components(), prob.shape());
  for (int k = 0; k < 4000; ++k) p = splitting_step(p, sys, gs);  // contracts at about 0.996 per step
  EXPECT_LT(relative_gap(p, direct.p[0]), 1e-6);
}

TEST(PdpsAdjoint, StepsMatchDenseSplitting) {
  const MriProblem prob = small_mri();
  const HyperParams a{0.5, 0.3, 0.2, 0.4};
  ImagingState s = verify::exact_inner(prob, a, 300);
  const PdpsAdjointSystem sys = prob.adjoint_system(0, s.u[0], a);
  std::mt19937_64 rng(5);
  AdjointMatrix p(sys.components(), prob.shape());
  for (auto& row : p.rows) row = PrimalDualState(test::random_grid(prob.shape(), rng), test::random_dual(prob.shape(), rng));
  const Matrix A = to_dense(sys), B = dense_targets(sys), P = to_dense(p);
  for (const SplittingScheme sch : {prob.scheme(Method::pdps_block_gs), prob.scheme(Method::pdps_identity)}) {
    const dense::Split sp = structured_split(sys, sch);
    Matrix expect(P.rows(), P.cols());
    for (Eigen::Index r = 0; r < P.rows(); ++r)
      expect.row(r) = sp.N.partialPivLu().solve(Vector(B.row(r).transpose() - sp.M * P.row(r).transpose())).transpose();
    const Matrix got = to_dense(splitting_step(p, sys, sch));
    EXPECT_LT((got - expect).norm(), 1e-9 * expect.norm()) << to_string(sch.kind);
  }
}

TEST(PdpsAdjoint, KrylovMatchesDirect) {
  const DeblurProblem prob = small_deblur();
  const HyperParams a{0.3, 0.3, 0.2, 0.5};
  ImagingState s = verify::exact_inner(prob, a, 500);
  ImagingState direct = s;
  verify::exact_adjoint(prob, direct, a);
  const PdpsAdjointSystem sys = prob.adjoint_system(0, s.u[0], a);
  KrylovResult kr;
  const AdjointMatrix p = krylov_solve(AdjointMatrix(sys.components(), prob.shape()), sys, 1e-12, 20000, &kr);
  EXPECT_TRUE(kr.converged) << kr.relative_residual;
  EXPECT_LT(relative_gap(p, direct.p[0]), 1e-6);
  // warm start at the solution: nothing to do
  KrylovResult again;
  krylov_solve(p, sys, 1e-10, 2000, &again);
  EXPECT_EQ(again.iterations, 0);
}

TEST(PdpsAdjoint, ZeroMaskGivesZeroDataRows) {
  const MriProblem prob = small_mri();
  const HyperParams a(4, 0.0);
  const PdpsAdjointSystem sys = prob.adjoint_system(0, PrimalDualState(prob.shape()), a);
  for (const auto& r : sys.rhs) EXPECT_EQ(r.norm(), 0.0);
}

TEST(PdpsAdjoint, InsideBallGivesZeroKernelScaleRow) {
  const DeblurProblem prob = small_deblur();
  const HyperParams a{0.3, 0.3, 0.2, 0.5};
  PrimalDualState u(prob.shape());
  u.x = prob.truth().front();
  u.y = DualField(prob.shape(), 1e-4);  // |y_j| well inside alpha0 = 0.03
  const PdpsAdjointSystem sys = prob.adjoint_system(0, u, a);
  EXPECT_EQ(sys.rhs[0].norm(), 0.0);
  EXPECT_GT(sys.rhs[1].norm(), 0.0);
}

TEST(PdpsAdjoint, RejectsMismatchedRows) {
  const DeblurProblem prob = small_deblur();
  const HyperParams a{0.3, 0.3, 0.2, 0.5};
  const PdpsAdjointSystem sys = prob.adjoint_system(0, PrimalDualState(prob.shape()), a);
  expect_error([&] { block_gs_step(AdjointMatrix(2, prob.shape()), sys, prob.theta_x_inverse(), 0.1); },
               ErrorCode::dimension_mismatch);
  SplittingScheme bad = SplittingScheme::dense_block_gs(3);
  expect_error([&] { splitting_step(AdjointMatrix(4, prob.shape()), sys, bad); }, ErrorCode::invalid_argument);
}

TEST(ThetaField, CentredLayout) {
  const Grid2 t = theta_x_field(8, 8);
  EXPECT_NEAR(t(4, 4), 0.1, 1e-15);
  EXPECT_NEAR(t(0, 0), 0.5, 1e-15);
  const Grid2 native = centered_to_fft_layout(t);
  EXPECT_NEAR(native(0, 0), 0.1, 1e-15);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_DOUBLE_EQ(native(r, c), native((8 - r) % 8, (8 - c) % 8));
}
