#pragma once

#include <random>
#include <string>

#include "bata/io/config.hpp"
#include "bata/io/image.hpp"
#include "bata/linops/mask.hpp"
#include "bata/problems/imaging.hpp"
#include "bata/problems/phantom.hpp"
#include "bata/prox/mri_data.hpp"
#include "bata/prox/outer.hpp"

namespace bata {

struct MriExperimentConfig {
  std::size_t n1 = 64, n2 = 64;
  std::size_t groups = 16;
  std::size_t training = 4;
  double alpha0 = 0.02;
  double beta = 10.0;
  double M = 0.15;
  double noise_std = 0.02;
  double epsilon = 1e-6;
  double delta = 1e-4;
  double initial_weight = 0.15;
  double sigma_block_gs = 1e-4;
  double sigma_identity = 1e-5;
  double sigma_implicit = 7e-4;
  PdpsSettings pdps = default_pdps();
  std::vector<std::string> phantom_paths;  // empty: synthetic phantoms
  std::uint64_t seed = 0;

  static PdpsSettings default_pdps() {
    PdpsSettings s;
    s.tau_x = 0.354;
    s.tau_y = 0.350;
    s.identity_theta_x = 0.1;
    s.identity_theta_y = 6.25e-4;
    s.block_theta_y = 0.1;
    s.implicit_krylov = false;
    s.implicit.inner_steps = 3000;
    s.implicit.adjoint_steps = 200;
    return s;
  }

  static MriExperimentConfig desk() { return {}; }

  static MriExperimentConfig paper() {
    MriExperimentConfig c;
    c.n1 = 292;
    c.n2 = 247;
    c.groups = 75;
    return c;
  }

  double sigma(Method m) const {
    return m == Method::pdps_block_gs ? sigma_block_gs : m == Method::pdps_identity ? sigma_identity : sigma_implicit;
  }

  /// Overrides from a key-value file; `sigma` and `theta_y` apply to `method`.
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
    kv.get("M", M);
    kv.get("alpha0", alpha0);
    kv.get("epsilon", epsilon);
    kv.get("delta", delta);
    kv.get("inner_steps", pdps.implicit.inner_steps);
    kv.get("adjoint_steps", pdps.implicit.adjoint_steps);
    kv.get("groups", groups);
    kv.get("noise_std", noise_std);
    kv.get("initial_weight", initial_weight);
  }
};

/// z_i = F(b_i + eta), eta ~ N(0, noise_std^2) per pixel.
inline std::vector<ComplexField> simulate_mri_data(const std::vector<Grid2>& phantoms, double noise_std,
                                                   std::uint64_t seed) {
  require(noise_std >= 0, ErrorCode::invalid_argument, "noise_std must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<ComplexField> out;
  for (const Grid2& b : phantoms) {
    Grid2 noisy = b;
    if (noise_std > 0)
      for (double& v : noisy.values) v += noise_std * n(rng);
    out.push_back(Fft2(b.shape()).forward(noisy));
  }
  return out;
}

/// Training phantoms: loaded files (rescaled to [0, 1]) or synthetic slices.
inline std::vector<Grid2> mri_training_images(const MriExperimentConfig& cfg) {
  std::vector<Grid2> out;
  if (!cfg.phantom_paths.empty()) {
    for (const auto& p : cfg.phantom_paths) {
      Grid2 img = io::load_image(p);
      if (img.rows != cfg.n1 || img.cols != cfg.n2) img = io::center_crop(img, cfg.n1, cfg.n2);
      out.push_back(std::move(img));
    }
    return out;
  }
  for (std::size_t i = 0; i < cfg.training; ++i)
    out.push_back(shepp_logan_phantom(cfg.n1, cfg.n2, static_cast<int>(i)));
  return out;
}

/// Sampling-pattern learning: the inner problem reconstructs x_i from line-weighted
/// k-space data, min 1/2 |Z_a(F x - z_i)|^2 + g_{eps,delta}(D x; alpha0), and the outer
/// variable is the vector of line-group weights.
class MriProblem : public PdpsImagingProblem {
 public:
  MriProblem(std::vector<Grid2> truth, std::vector<ComplexField> data, const MriExperimentConfig& cfg)
      : PdpsImagingProblem(std::move(truth), cfg.pdps), data_(std::move(data)), cfg_(cfg),
        fft_(std::make_shared<Fft2>(shape_)) {
    require(data_.size() == truth_.size(), ErrorCode::dimension_mismatch, "MRI: one measurement per image");
    for (const auto& z : data_) require(z.shape() == shape_, ErrorCode::dimension_mismatch, "MRI: data shape");
    line_map_ = symmetric_line_map(shape_.rows, cfg.groups);
    outer_.w = line_group_weights(line_map_, cfg.groups);
    outer_.M = cfg.M;
    outer_.beta = cfg.beta;
    outer_.validate(cfg.groups);
    tv_.epsilon = cfg.epsilon;
    tv_.delta = cfg.delta;
    tv_.alpha0 = cfg.alpha0;
    tv_.validate();
  }

  const MriExperimentConfig& config() const { return cfg_; }
  const std::vector<ComplexField>& data() const { return data_; }
  const std::vector<std::size_t>& line_map() const { return line_map_; }
  const std::vector<double>& group_weights() const { return outer_.w; }
  const MriOuterRegParams& outer_params() const { return outer_; }

  MaskParams mask(const HyperParams& a) const {
    require(a.size() == cfg_.groups, ErrorCode::dimension_mismatch, "MRI: alpha has the wrong length");
    return MaskParams{a, line_map_};
  }

  std::size_t alpha_dim() const override { return cfg_.groups; }
  HyperParams initial_alpha() const override { return HyperParams(cfg_.groups, cfg_.initial_weight); }
  SmoothedTVConjParams tv_params(const HyperParams&) const override { return tv_; }
  double lipschitz_e(const HyperParams&) const override { return 0.0; }

  InnerProblemCallbacks callbacks(std::size_t i, const HyperParams& a) const override {
    InnerProblemCallbacks cb;
    const MaskParams m = mask(a);
    const ComplexField* z = &data_.at(i);
    auto fft = fft_;
    cb.prox_f0 = [m, z, fft](const Grid2& v, double tau, const HyperParams&) {
      return prox_mri_data(v, tau, m, *z, *fft);
    };
    const SmoothedTVConjParams tv = tv_;
    cb.prox_g_conj = [tv](const DualField& v, double tau, const HyperParams&) {
      return prox_smoothed_tv_conj(v, tau, tv);
    };
    cb.K = K_;
    return cb;
  }

  /// Re F*(Z^2 (F x - z)).
  Grid2 grad_f(std::size_t i, const Grid2& x, const HyperParams& a) const override {
    const MaskParams m = mask(a);
    ComplexField r = fft_->forward(x);
    const ComplexField& z = data_.at(i);
    for (std::size_t row = 0; row < r.rows; ++row) {
      const double w2 = m.row_weight(row) * m.row_weight(row);
      for (std::size_t c = 0; c < r.cols; ++c) r(row, c) = w2 * (r(row, c) - z(row, c));
    }
    return fft_->inverse_real(std::move(r));
  }

  PdpsAdjointSystem adjoint_system(std::size_t i, const PrimalDualState& u, const HyperParams& a) const override {
    const MaskParams m = mask(a);
    PdpsAdjointSystem sys;
    sys.fft = fft_;
    sys.K = K_;
    sys.hess_x_multiplier.resize(shape_.pixels());
    for (std::size_t r = 0; r < shape_.rows; ++r)
      for (std::size_t c = 0; c < shape_.cols; ++c)
        sys.hess_x_multiplier[r * shape_.cols + c] = m.row_weight(r) * m.row_weight(r);
    sys.hess_y = hess_smoothed_tv_conj(u.y, tv_);
    // Row j: (Re F*(2 a_j 1_{group j} (F x - z)), 0); g* does not depend on a.
    const ComplexField resid = [&] {
      ComplexField f = fft_->forward(u.x);
      const ComplexField& z = data_.at(i);
      for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] -= z.values[k];
      return f;
    }();
    for (std::size_t j = 0; j < cfg_.groups; ++j) {
      ComplexField g(shape_);
      if (a[j] != 0.0)
        for (std::size_t r = 0; r < shape_.rows; ++r) {
          if (line_map_[r] != j) continue;
          for (std::size_t c = 0; c < shape_.cols; ++c) g(r, c) = 2.0 * a[j] * resid(r, c);
        }
      sys.rhs.emplace_back(fft_->inverse_real(std::move(g)), DualField(shape_));
    }
    return sys;
  }

  HyperParams outer_prox(const HyperParams& a, double sigma) const override {
    return prox_mri_outer(a, sigma, outer_);
  }
  double outer_regulariser(const HyperParams& a) const override { return mri_outer_value(a, outer_); }

 private:
  std::vector<ComplexField> data_;
  MriExperimentConfig cfg_;
  std::shared_ptr<const Fft2> fft_;
  std::vector<std::size_t> line_map_;
  MriOuterRegParams outer_;
  SmoothedTVConjParams tv_;
};

inline MriProblem build_mri_problem(const MriExperimentConfig& cfg) {
  std::vector<Grid2> truth = mri_training_images(cfg);
  std::vector<ComplexField> data = simulate_mri_data(truth, cfg.noise_std, cfg.seed);
  return MriProblem(std::move(truth), std::move(data), cfg);
}

}  // namespace bata
