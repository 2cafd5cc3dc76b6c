#include "bata/prox/mri_data.hpp"
#include "bata/prox/outer.hpp"
#include "bata/prox/smoothed_tv.hpp"
#include "bata/verification/derivatives.hpp"
#include "bata/verification/prox_suite.hpp"
#include "helpers.hpp"

using namespace bata;
using bata::test::expect_error;

namespace {

DualField pixel(double a, double b) { return DualField(Shape{1, 1}, {a, b}); }

// Scalar optimality equation of the outer branch in the radius r = t |v|:
// r - |v| + tau (delta r + (r - alpha0)^2 / eps) = 0, solved by bisection on [alpha0, |v|].
double bisect_radius(double vn, double tau, const SmoothedTVConjParams& p) {
  auto f = [&](double r) { return r - vn + tau * (p.delta * r + (r - p.alpha0) * (r - p.alpha0) / p.epsilon); };
  double lo = p.alpha0, hi = vn;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(SmoothedTvProx, ZeroIsFixed) {
  const DualField y = prox_smoothed_tv_conj(pixel(0, 0), 0.35, {});
  EXPECT_EQ(y.norm(), 0.0);
}

TEST(SmoothedTvProx, InnerBranchIsShrink) {
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  const DualField v = pixel(0.006, 0.008);  // |v| = 0.01
  const DualField y = prox_smoothed_tv_conj(v, 0.35, p);
  EXPECT_NEAR(y.at(0, 0), 0.006 / (1 + 3.5e-5), 1e-16);
  EXPECT_NEAR(y.at(0, 1), 0.008 / (1 + 3.5e-5), 1e-16);
}

TEST(SmoothedTvProx, OuterBranchMatchesBisection) {
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  const DualField v = pixel(0.03, 0.04);  // |v| = 0.05
  const DualField y = prox_smoothed_tv_conj(v, 0.35, p);
  EXPECT_NEAR(y.pixel_norm(0), bisect_radius(0.05, 0.35, p), 1e-10);
  // same direction as v
  EXPECT_NEAR(y.at(0, 0) * 0.04 - y.at(0, 1) * 0.03, 0.0, 1e-16);
}

TEST(SmoothedTvProx, ContinuousAcrossBranchBoundary) {
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  const double tau = 0.35, edge = (1 + tau * p.delta) * p.alpha0;
  const double inner = edge / (1 + tau * p.delta);
  const double outer = prox_smoothed_tv_conj_scale(edge, tau, p) * edge;
  EXPECT_NEAR(inner, outer, 1e-9);
}

TEST(SmoothedTvProx, OptimalityResidual) {
  std::mt19937_64 rng(5);
  SmoothedTVConjParams p{1e-4, 1e-3, 0.05};
  const DualField v = test::random_dual(Shape{6, 6}, rng, 0.08);
  const double tau = 0.5;
  const DualField y = prox_smoothed_tv_conj(v, tau, p);
  DualField r = y - v;
  r += tau * grad_smoothed_tv_conj(y, p);
  EXPECT_LT(r.norm(), 1e-8 * v.norm());
}

TEST(SmoothedTvProx, Nonexpansive) {
  std::mt19937_64 rng(6);
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  for (int k = 0; k < 100; ++k) {
    const DualField a = test::random_dual(Shape{1, 1}, rng, 0.05), b = test::random_dual(Shape{1, 1}, rng, 0.05);
    EXPECT_LE((prox_smoothed_tv_conj(a, 0.35, p) - prox_smoothed_tv_conj(b, 0.35, p)).norm(),
              (a - b).norm() * (1 + 1e-12));
  }
  expect_error([&] { prox_smoothed_tv_conj(pixel(1, 1), 0.0, p); }, ErrorCode::invalid_argument);
}

TEST(SmoothedTvDerivatives, InsideTheBall) {
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  const DualField y = pixel(0.01, 0.005);
  const DualField g = grad_smoothed_tv_conj(y, p);
  EXPECT_DOUBLE_EQ(g.at(0, 0), 1e-4 * 0.01);
  EXPECT_EQ(grad_smoothed_tv_conj(pixel(0, 0), p).norm(), 0.0);
  const Sym2 h = hess_smoothed_tv_conj_pixel(0.01, 0.005, p);
  EXPECT_DOUBLE_EQ(h.xx, 1e-4);
  EXPECT_DOUBLE_EQ(h.xy, 0.0);
  const Sym2 ring = hess_smoothed_tv_conj_pixel(0.02, 0.0, p);
  EXPECT_NEAR(ring.xx, 1e-4, 1e-12);
  EXPECT_NEAR(ring.yy, 1e-4, 1e-12);
  EXPECT_EQ(grad_smoothed_tv_conj_dalpha0(y, p).norm(), 0.0);
}

TEST(SmoothedTvDerivatives, StronglyMonotoneGradient) {
  std::mt19937_64 rng(7);
  SmoothedTVConjParams p{1e-6, 1e-4, 0.02};
  for (int k = 0; k < 50; ++k) {
    const DualField a = test::random_dual(Shape{3, 3}, rng, 0.03), b = test::random_dual(Shape{3, 3}, rng, 0.03);
    const DualField d = a - b;
    EXPECT_GE((grad_smoothed_tv_conj(a, p) - grad_smoothed_tv_conj(b, p)).dot(d), p.delta * d.dot(d) * (1 - 1e-9));
  }
}

TEST(SmoothedTvDerivatives, FiniteDifferenceOracles) {
  const auto g = verify::tv_gradient_check(100);
  EXPECT_TRUE(g.pass) << g.max_rel_error;
  const auto h = verify::tv_hessian_check(50);
  EXPECT_TRUE(h.pass) << h.max_rel_error;
  const auto d = verify::tv_alpha0_check(50);
  EXPECT_TRUE(d.pass) << d.max_rel_error;
}

TEST(DeblurOuterProx, Examples) {
  DeblurOuterRegParams p;
  p.beta = 0.0;
  const auto a = prox_deblur_outer({-0.5, 0.2, 0.3, 0.4}, 1.0, p);
  EXPECT_EQ(a, (std::array<double, 4>{0.0, 0.2, 0.3, 0.4}));
  p.beta = 1.0;
  const auto b = prox_deblur_outer({-1, 0, 0, 0}, 1.0, p);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(b[j], 2.0 / 7.0, 1e-15);
  EXPECT_EQ(b[0], 0.0);
  expect_error([&] { prox_deblur_outer({0, 0, 0, 0}, 0.0, p); }, ErrorCode::invalid_argument);
}

TEST(DeblurOuterProx, FirstOrderCondition) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  DeblurOuterRegParams p;
  for (int k = 0; k < 50; ++k) {
    const std::array<double, 4> v{n(rng), n(rng), n(rng), n(rng)};
    const double sigma = 1e-3 * (1 + k);
    const auto a = prox_deblur_outer(v, sigma, p);
    // (I + k 11^T) a = v + k 1 on components 2..4
    const double k2 = 2 * sigma * p.beta;
    const Eigen::Matrix3d M = Eigen::Matrix3d::Identity() + k2 * Eigen::Matrix3d::Ones();
    const Eigen::Vector3d rhs(v[1] + k2, v[2] + k2, v[3] + k2);
    const Eigen::Vector3d x = M.partialPivLu().solve(rhs);
    for (int j = 1; j < 4; ++j) EXPECT_NEAR(a[j], x[j - 1], 1e-11 * (1 + std::abs(v[j])));
  }
}

TEST(MriOuterProx, ZeroInput) {
  MriOuterRegParams p{{0.25, 0.25, 0.5}, 0.15, 10.0};
  for (double v : prox_mri_outer({0, 0, 0}, 0.1, p)) EXPECT_EQ(v, 0.0);
}

TEST(MriOuterProx, PureShrinkageBranch) {
  MriOuterRegParams p{{0.25, 0.25, 0.5}, 1.0, 1.0};
  const double tau = 0.1;
  const std::vector<double> a{0.5, 0.6, 0.7};
  double wa = 0.0, ww = 0.0;
  for (int i = 0; i < 3; ++i) {
    wa += p.w[i] * a[i];
    ww += p.w[i] * p.w[i];
    ASSERT_GT(a[i], p.w[i] * tau * p.beta);
  }
  ASSERT_LT(wa - p.M, tau * p.beta * ww);
  const auto out = prox_mri_outer(a, tau, p);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(out[i], a[i] - tau * p.beta * p.w[i], 1e-15);
}

TEST(MriOuterProx, FeasibleOutput) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  MriOuterRegParams p;
  p.w = line_group_weights(std::vector<std::size_t>{0, 1, 2, 3, 3, 2, 1, 4}, 5);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> a(5);
    for (double& v : a) v = 0.2 + 0.5 * n(rng);
    const auto out = prox_mri_outer(a, 0.01, p);
    double wa = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_GE(out[i], 0.0);
      wa += p.w[i] * out[i];
    }
    EXPECT_LE(wa, p.M + 1e-12);
  }
}

TEST(MriOuterProx, TiesAtThreshold) {
  MriOuterRegParams p{{0.25, 0.25, 0.25, 0.25}, 0.1, 1.0};
  const auto out = prox_mri_outer({0.5, 0.5, 0.5, 0.5}, 0.1, p);
  for (double v : out) EXPECT_NEAR(v, 0.1, 1e-12);
  MriOuterRegParams bad{{0.5, 0.6}, 0.1, 1.0};
  expect_error([&] { prox_mri_outer({1, 1}, 0.1, bad); }, ErrorCode::invalid_argument);
}

TEST(MriDataProx, Examples) {
  const Shape s{8, 8};
  std::mt19937_64 rng(10);
  const Grid2 v = test::random_grid(s, rng);
  const auto map = symmetric_line_map(8, 4);
  const ComplexField z = Fft2(s).forward(test::random_grid(s, rng));
  const Grid2 same = prox_mri_data(v, 0.7, MaskParams{{0, 0, 0, 0}, map}, z);
  EXPECT_LT((same - v).norm(), 1e-13);
  const Grid2 shrunk = prox_mri_data(v, 0.7, MaskParams{{1, 1, 1, 1}, map}, ComplexField(s));
  EXPECT_LT((shrunk - (1.0 / 1.7) * v).norm(), 1e-13);
}

TEST(MriDataProx, OptimalityResidual) {
  const Shape s{8, 8};
  std::mt19937_64 rng(12);
  const Grid2 v = test::random_grid(s, rng);
  const MaskParams m{{1.0, 0.3, 0.0, 0.8}, symmetric_line_map(8, 4)};
  const Fft2 fft(s);
  const ComplexField z = fft.forward(test::random_grid(s, rng));
  const double tau = 0.35;
  const Grid2 x = prox_mri_data(v, tau, m, z, fft);
  // grad f0 = Re F*(Z^2 (F x - z))
  ComplexField r = fft.forward(x);
  for (std::size_t row = 0; row < s.rows; ++row)
    for (std::size_t c = 0; c < s.cols; ++c) r(row, c) = m.row_weight(row) * m.row_weight(row) * (r(row, c) - z(row, c));
  Grid2 res = x - v;
  res += tau * fft.inverse_real(r);
  EXPECT_LT(res.norm(), 1e-9);
}

TEST(BruteOracle, ZeroRegulariserIsIdentity) {
  auto sample = [](std::mt19937_64& rng) {
    verify::ProxInstance inst;
    inst.v = verify::Vec::Random(3);
    (void)rng;
    return inst;
  };
  const auto rep = verify::brute_prox_oracle(
      "identity", [](const verify::ProxInstance& i) { return i.v; }, [](const verify::Vec&) { return 0.0; },
      [](const verify::Vec& z) { return z; }, sample, 5, 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.max_rel_error, 0.0);
}

TEST(BruteOracle, AllProxMapsSmallRun) {
  for (const auto& rep : {verify::prox_smoothed_tv_oracle(30), verify::prox_deblur_outer_oracle(30),
                          verify::prox_mri_outer_oracle(30), verify::prox_mri_data_oracle(30)})
    EXPECT_TRUE(rep.pass) << rep.name << " " << rep.max_rel_error;
}
