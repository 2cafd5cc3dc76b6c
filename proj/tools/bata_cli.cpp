// Command-line driver: builds one of the experiments, runs BATA and writes the
// iterate log, the learned parameters and the reconstructions.

#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <sstream>

#include "bata/bata.hpp"

namespace {

using namespace bata;

struct Options {
  std::string problem;
  std::string method = "pdps-block-gs";
  std::string config;
  std::optional<double> budget_seconds;
  std::optional<long> iters;
  std::string out;
  std::uint64_t seed = 0;
  std::string scale = "desk";
  std::string reference_alpha;
  long log_every = 1;
};

HyperParams read_alpha_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path.string());
  HyperParams a;
  std::string tok;
  while (std::getline(in, tok, '\n')) {
    std::replace(tok.begin(), tok.end(), ',', ' ');
    std::istringstream line(tok);
    double v;
    while (line >> v) a.push_back(v);
  }
  require(!a.empty(), ErrorCode::invalid_argument, path.string() + ": no numbers");
  return a;
}

void write_alpha_csv(const std::filesystem::path& path, const HyperParams& a) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
  out << "index,alpha\n" << std::setprecision(17);
  for (std::size_t j = 0; j < a.size(); ++j) out << j + 1 << ',' << a[j] << '\n';
}

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  auto p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

void warn_unknown_keys(const io::KeyValueConfig& kv, const std::set<std::string>& known) {
  for (const auto& [k, v] : kv.entries())
    if (!known.count(k)) std::cerr << "warning: config key '" << k << "' is not used by this problem\n";
}

double relative_error(const Grid2& x, const Grid2& b) { return (x - b).norm() / b.norm(); }

template <BilevelProblem P>
RunResult<typename P::State> drive(const P& problem, const RunConfig& rc, const RunReference<typename P::State>& ref,
                                   const Options& opt) {
  std::cerr << "running " << to_string(rc.method) << " with sigma = " << rc.sigma << '\n';
  auto res = run(problem, rc, ref);
  res.log.write_csv(std::filesystem::path(opt.out));
  write_alpha_csv(sibling(opt.out, "_alpha.csv"), res.final.alpha);
  const auto& last = res.log.records.back();
  std::cout << "iterations " << last.iter << ", cpu " << last.cputime << " s, J+R " << last.objective << '\n';
  std::cout << "alpha";
  for (double a : res.final.alpha) std::cout << ' ' << a;
  std::cout << '\n';
  if (res.log.aborted()) std::cerr << "error: " << res.log.error << '\n';
  return res;
}

void write_reconstructions(const Options& opt, const PdpsImagingProblem& problem, const ImagingState& s) {
  for (std::size_t i = 0; i < problem.examples(); ++i)
    io::write_pgm(sibling(opt.out, "_recon" + std::to_string(i) + ".pgm"), s.u[i].x);
}

RunConfig run_config(const Options& opt, Method m, double sigma) {
  RunConfig rc;
  rc.method = m;
  rc.sigma = sigma;
  rc.budget_seconds = opt.budget_seconds;
  rc.max_iterations = opt.iters;
  rc.log_every = opt.log_every;
  rc.seed = opt.seed;
  return rc;
}

int run_quadratic(const Options& opt, Method m, const io::KeyValueConfig& kv) {
  warn_unknown_keys(kv, {"outputs", "params", "inner_tau", "identity_theta", "sigma"});
  QuadraticConfig cfg;
  cfg.seed = opt.seed;
  kv.get("outputs", cfg.outputs);
  kv.get("params", cfg.params);
  kv.get("inner_tau", cfg.inner_tau);
  kv.get("identity_theta", cfg.identity_theta);
  kv.get("sigma", cfg.sigma);
  const QuadraticProblem problem = QuadraticProblem::random(cfg);
  RunReference<QuadraticProblem::State> ref;
  const dense::Vector star = problem.alpha_star();
  ref.alpha = HyperParams(star.data(), star.data() + star.size());
  if (!opt.reference_alpha.empty()) ref.alpha = read_alpha_csv(opt.reference_alpha);
  ref.state = problem.implicit_solve(*ref.alpha).state;
  const auto res = drive(problem, run_config(opt, m, cfg.sigma), ref, opt);
  return res.log.aborted() ? 1 : 0;
}

const std::set<std::string> kImagingKeys = {"sigma",   "tau_x",       "tau_y",  "theta_x",      "theta_y",
                                            "beta",    "epsilon",     "delta",  "inner_steps",  "adjoint_steps",
                                            "noise_std"};

int run_deblur(const Options& opt, Method m, const io::KeyValueConfig& kv) {
  auto known = kImagingKeys;
  known.insert({"C", "alpha0", "rotation_deg", "image"});
  warn_unknown_keys(kv, known);
  DeblurExperimentConfig cfg = opt.scale == "paper" ? DeblurExperimentConfig::paper() : DeblurExperimentConfig::desk();
  cfg.seed = opt.seed;
  cfg.image_path = kv.get_string("image");
  cfg.apply(kv, m);
  const DeblurProblem problem = build_deblur_problem(cfg);
  RunReference<ImagingState> ref;
  if (!opt.reference_alpha.empty()) ref.alpha = read_alpha_csv(opt.reference_alpha);
  const auto res = drive(problem, run_config(opt, m, cfg.sigma(m)), ref, opt);
  write_reconstructions(opt, problem, res.final.s);
  const Grid2& b = problem.truth().front();
  std::cout << "relative error: blurry " << relative_error(problem.data().front(), b) << ", reconstruction "
            << relative_error(res.final.s.u.front().x, b) << '\n';
  std::cout << "true kernel " << cfg.true_kernel.alpha2 << ' ' << cfg.true_kernel.alpha3 << ' '
            << cfg.true_kernel.alpha4 << '\n';
  return res.log.aborted() ? 1 : 0;
}

int run_mri(const Options& opt, Method m, const io::KeyValueConfig& kv) {
  auto known = kImagingKeys;
  known.insert({"M", "alpha0", "groups", "initial_weight", "phantoms"});
  warn_unknown_keys(kv, known);
  MriExperimentConfig cfg = opt.scale == "paper" ? MriExperimentConfig::paper() : MriExperimentConfig::desk();
  cfg.seed = opt.seed;
  if (const std::string list = kv.get_string("phantoms"); !list.empty()) {
    std::istringstream in(list);
    for (std::string p; std::getline(in, p, ',');)
      if (!p.empty()) cfg.phantom_paths.push_back(p);
  }
  cfg.apply(kv, m);
  const MriProblem problem = build_mri_problem(cfg);
  RunReference<ImagingState> ref;
  if (!opt.reference_alpha.empty()) ref.alpha = read_alpha_csv(opt.reference_alpha);
  const auto res = drive(problem, run_config(opt, m, cfg.sigma(m)), ref, opt);
  write_reconstructions(opt, problem, res.final.s);
  double mass = 0;
  for (std::size_t j = 0; j < res.final.alpha.size(); ++j) mass += problem.group_weights()[j] * res.final.alpha[j];
  std::cout << "mask mass w'alpha = " << mass << " (M = " << cfg.M << ")\n";
  return res.log.aborted() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilevel learning by single-loop tracking (BATA)"};
  Options opt;
  app.add_option("--problem", opt.problem, "Experiment")->required()->check(CLI::IsMember({"mri", "deblur", "quadratic"}));
  app.add_option("--method", opt.method, "Solver for the inner and adjoint problems")
      ->check(CLI::IsMember({"pdps-block-gs", "pdps-identity", "implicit"}));
  app.add_option("--config", opt.config, "key = value parameter file")->check(CLI::ExistingFile);
  app.add_option("--budget-seconds", opt.budget_seconds, "CPU-time budget");
  app.add_option("--iters", opt.iters, "Outer iteration budget");
  app.add_option("--out", opt.out, "Iterate log (CSV); default ./run.csv");
  app.add_option("--seed", opt.seed, "Seed for data simulation");
  app.add_option("--scale", opt.scale, "Problem size")->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--reference-alpha", opt.reference_alpha, "CSV with a reference alpha for the alphaDiff column")
      ->check(CLI::ExistingFile);
  app.add_option("--log-every", opt.log_every, "Log every n-th iteration")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  if (!opt.budget_seconds && !opt.iters) {
    std::cerr << "error: give --budget-seconds or --iters\n" << app.help();
    return 2;
  }
  if (opt.out.empty()) {
    opt.out = "./run.csv";
    std::cerr << "warning: --out not given, writing ./run.csv\n";
  }
  try {
    const Method m = parse_method(opt.method);
    const io::KeyValueConfig kv = opt.config.empty() ? io::KeyValueConfig{} : io::KeyValueConfig::load(opt.config);
    if (opt.problem == "quadratic") return run_quadratic(opt, m, kv);
    if (opt.problem == "deblur") return run_deblur(opt, m, kv);
    return run_mri(opt, m, kv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
