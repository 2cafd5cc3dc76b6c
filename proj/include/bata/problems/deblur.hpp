#pragma once

#include <random>
#include <string>

#include "bata/io/config.hpp"
#include "bata/io/image.hpp"
#include "bata/linops/convolution.hpp"
#include "bata/linops/rotate.hpp"
#include "bata/problems/imaging.hpp"
#include "bata/problems/phantom.hpp"
#include "bata/prox/outer.hpp"

namespace bata {

struct DeblurExperimentConfig {
  std::size_t n1 = 64, n2 = 64;
  KernelParams true_kernel{0.15, 0.10, 0.75};
  double rotation_deg = 1.0;
  double noise_std = 0.02;
  double beta = 1e4;
  double C = 0.1;  // alpha0 = C alpha1
  double epsilon = 1e-6;
  double delta = 1e-4;
  HyperParams initial_alpha{0.1, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  double sigma_block_gs = 1e-5;
  double sigma_identity = 5e-7;
  double sigma_implicit = 2e-4;
  PdpsSettings pdps = default_pdps();
  std::string image_path;  // empty: synthetic image
  std::uint64_t seed = 0;

  static PdpsSettings default_pdps() {
    PdpsSettings s;
    s.tau_x = 0.600;
    s.tau_y = 0.141;
    s.identity_theta_x = 1e-3;
    s.identity_theta_y = 1e-3;
    s.block_theta_y = 0.1;
    s.implicit_krylov = true;
    s.krylov_tolerance = 1e-4;
    s.krylov_max_iterations = 2000;
    s.implicit.inner_steps = 2500;
    s.implicit.adjoint_steps = 2000;
    return s;
  }

  /// 64x64. The default outer steps suit 128x128 and crawl here, so they are
  /// larger; block-GS keeps 10x the identity-splitting step.
  static DeblurExperimentConfig desk() {
    DeblurExperimentConfig c;
    c.sigma_block_gs = 4e-4;
    c.sigma_identity = 4e-5;
    c.sigma_implicit = 4e-4;
    return c;
  }

  static DeblurExperimentConfig paper() {
    DeblurExperimentConfig c;
    c.n1 = c.n2 = 128;
    return c;
  }

  double sigma(Method m) const {
    return m == Method::pdps_block_gs ? sigma_block_gs : m == Method::pdps_identity ? sigma_identity : sigma_implicit;
  }

  void apply(const io::KeyValueConfig& kv, Method method) {
    double s = sigma(method);
    kv.get("sigma", s);
    (method == Method::pdps_block_gs ? sigma_block_gs : method == Method::pdps_identity ? sigma_identity
                                                                                        : sigma_implicit) = s;
    kv.get("tau_x", pdps.tau_x);
    kv.get("tau_y", pdps.tau_y);
    if (method == Method::pdps_identity) {
      kv.get("theta_x", pdps.identity_theta_x);
      kv.get("theta_y", pdps.identity_theta_y);
    } else {
      kv.get("theta_y", pdps.block_theta_y);
    }
    kv.get("beta", beta);
    kv.get("C", C);
    kv.get("epsilon", epsilon);
    kv.get("delta", delta);
    kv.get("inner_steps", pdps.implicit.inner_steps);
    kv.get("adjoint_steps", pdps.implicit.adjoint_steps);
    kv.get("noise_std", noise_std);
    kv.get("rotation_deg", rotation_deg);
    // alpha0 is C alpha1 here; a fixed alpha0 sets the initial alpha1.
    if (kv.has("alpha0")) {
      double a0 = 0;
      kv.get("alpha0", a0);
      initial_alpha[0] = a0 / C;
    }
  }
};

/// z = r_{-theta}(A r_theta(b)) + eta. The rotations wrap around like the periodic
/// blur does, so interpolation is the only mismatch with the model.
inline Grid2 simulate_deblur_data(const Grid2& b, const KernelParams& kernel, double noise_std, std::uint64_t seed,
                                  double rotation_deg = 1.0) {
  require(noise_std >= 0, ErrorCode::invalid_argument, "noise_std must be nonnegative");
  constexpr auto wrap = RotateBoundary::periodic;
  Grid2 z = rotate(conv_build(b.shape(), kernel).apply(rotate(b, rotation_deg, wrap)), -rotation_deg, wrap);
  if (noise_std > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, noise_std);
    for (double& v : z.values) v += n(rng);
  }
  return z;
}

inline Grid2 deblur_training_image(const DeblurExperimentConfig& cfg) {
  if (cfg.image_path.empty()) return textured_image(cfg.n1, cfg.n2, 2);
  return io::center_crop(io::load_image(cfg.image_path), cfg.n1, cfg.n2);
}

/// Kernel identification: alpha = (alpha1, alpha2, alpha3, alpha4), the inner problem
///   min 1/2 |A_a x - z|^2 + g_{eps,delta}(D x; C alpha1)
/// with the data term as the forward-step part e and f0 = 0.
class DeblurProblem : public PdpsImagingProblem {
 public:
  DeblurProblem(std::vector<Grid2> truth, std::vector<Grid2> data, const DeblurExperimentConfig& cfg)
      : PdpsImagingProblem(std::move(truth), cfg.pdps), data_(std::move(data)), cfg_(cfg),
        fft_(std::make_shared<Fft2>(shape_)) {
    require(data_.size() == truth_.size(), ErrorCode::dimension_mismatch, "deblur: one measurement per image");
    require(cfg.C > 0, ErrorCode::invalid_argument, "deblur: C must be positive");
    require(cfg.initial_alpha.size() == 4, ErrorCode::invalid_argument, "deblur: alpha has four components");
    for (const auto& z : data_) {
      require(z.shape() == shape_, ErrorCode::dimension_mismatch, "deblur: data shape");
      data_hat_.push_back(fft_->forward(z));
    }
    for (int j = 2; j <= 4; ++j) unit_.push_back(conv_param_derivative(shape_, j).multiplier());
    outer_.beta = cfg.beta;
  }

  const DeblurExperimentConfig& config() const { return cfg_; }
  const std::vector<Grid2>& data() const { return data_; }

  /// Fourier multiplier of A_a (sum_j a_j times the unit-group multipliers).
  ComplexField multiplier(const HyperParams& a) const {
    require(a.size() == 4, ErrorCode::dimension_mismatch, "deblur: alpha has four components");
    ComplexField m(shape_);
    for (std::size_t k = 0; k < m.values.size(); ++k)
      m.values[k] = a[1] * unit_[0].values[k] + a[2] * unit_[1].values[k] + a[3] * unit_[2].values[k];
    return m;
  }

  Grid2 blur(const Grid2& x, const HyperParams& a) const {
    const ComplexField m = multiplier(a);
    ComplexField f = fft_->forward(x);
    for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] *= m.values[k];
    return fft_->inverse_real(std::move(f));
  }

  std::size_t alpha_dim() const override { return 4; }
  HyperParams initial_alpha() const override { return cfg_.initial_alpha; }

  SmoothedTVConjParams tv_params(const HyperParams& a) const override {
    SmoothedTVConjParams p;
    p.epsilon = cfg_.epsilon;
    p.delta = cfg_.delta;
    p.alpha0 = std::max(0.0, cfg_.C * a.at(0));
    return p;
  }

  /// |A_a|^2 exactly: the largest squared modulus of the Fourier multiplier.
  double lipschitz_e(const HyperParams& a) const override {
    double l = 0.0;
    for (const cplx& v : multiplier(a).values) l = std::max(l, std::norm(v));
    return l;
  }

  InnerProblemCallbacks callbacks(std::size_t i, const HyperParams& a) const override {
    InnerProblemCallbacks cb;
    cb.prox_f0 = [](const Grid2& v, double, const HyperParams&) { return v; };
    auto m = std::make_shared<const ComplexField>(multiplier(a));
    const ComplexField* zh = &data_hat_.at(i);
    auto fft = fft_;
    cb.grad_e = [m, zh, fft](const Grid2& x, const HyperParams&) { return grad_data(x, *m, *zh, *fft); };
    const SmoothedTVConjParams tv = tv_params(a);
    cb.prox_g_conj = [tv](const DualField& v, double tau, const HyperParams&) {
      return prox_smoothed_tv_conj(v, tau, tv);
    };
    cb.K = K_;
    return cb;
  }

  Grid2 grad_f(std::size_t i, const Grid2& x, const HyperParams& a) const override {
    return grad_data(x, multiplier(a), data_hat_.at(i), *fft_);
  }

  PdpsAdjointSystem adjoint_system(std::size_t i, const PrimalDualState& u, const HyperParams& a) const override {
    const ComplexField m = multiplier(a);
    PdpsAdjointSystem sys;
    sys.fft = fft_;
    sys.K = K_;
    sys.hess_x_multiplier.resize(shape_.pixels());
    for (std::size_t k = 0; k < m.values.size(); ++k) sys.hess_x_multiplier[k] = std::norm(m.values[k]);
    const SmoothedTVConjParams tv = tv_params(a);
    sys.hess_y = hess_smoothed_tv_conj(u.y, tv);

    // alpha1 enters only through alpha0 = C alpha1.
    DualField dy = grad_smoothed_tv_conj_dalpha0(u.y, tv);
    dy *= cfg_.C;
    sys.rhs.emplace_back(Grid2(shape_), std::move(dy));

    // d/d a_j of A*(A x - z) = A_j*(A x - z) + A* A_j x, diagonal in Fourier.
    const ComplexField fx = fft_->forward(u.x);
    const ComplexField& zh = data_hat_.at(i);
    for (std::size_t j = 0; j < 3; ++j) {
      ComplexField g(shape_);
      for (std::size_t k = 0; k < g.values.size(); ++k) {
        const cplx mj = unit_[j].values[k];
        g.values[k] = std::conj(mj) * (m.values[k] * fx.values[k] - zh.values[k]) +
                      std::conj(m.values[k]) * mj * fx.values[k];
      }
      sys.rhs.emplace_back(fft_->inverse_real(std::move(g)), DualField(shape_));
    }
    return sys;
  }

  HyperParams outer_prox(const HyperParams& a, double sigma) const override {
    require(a.size() == 4, ErrorCode::dimension_mismatch, "deblur: alpha has four components");
    const auto r = prox_deblur_outer({a[0], a[1], a[2], a[3]}, sigma, outer_);
    return HyperParams(r.begin(), r.end());
  }
  double outer_regulariser(const HyperParams& a) const override { return deblur_outer_value(a, outer_); }

 private:
  static Grid2 grad_data(const Grid2& x, const ComplexField& m, const ComplexField& zh, const Fft2& fft) {
    ComplexField f = fft.forward(x);
    for (std::size_t k = 0; k < f.values.size(); ++k)
      f.values[k] = std::conj(m.values[k]) * (m.values[k] * f.values[k] - zh.values[k]);
    return fft.inverse_real(std::move(f));
  }

  std::vector<Grid2> data_;
  std::vector<ComplexField> data_hat_;
  DeblurExperimentConfig cfg_;
  std::shared_ptr<const Fft2> fft_;
  std::vector<ComplexField> unit_;
  DeblurOuterRegParams outer_;
};

inline DeblurProblem build_deblur_problem(const DeblurExperimentConfig& cfg) {
  Grid2 b = deblur_training_image(cfg);
  Grid2 z = simulate_deblur_data(b, cfg.true_kernel, cfg.noise_std, cfg.seed, cfg.rotation_deg);
  return DeblurProblem({std::move(b)}, {std::move(z)}, cfg);
}

}  // namespace bata
