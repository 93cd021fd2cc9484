#include "tvsar/sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "tvsar/parallel.hpp"

namespace tvsar {

namespace {

// Bootstrap seeds live in a separate stream range so they never collide with
// the data streams indexed by replicate.
constexpr std::uint64_t kBootstrapStreamBase = 1ull << 32;

Eigen::VectorXd rho_curve(const DgpConfig& cfg,
                          const Eigen::Ref<const Eigen::VectorXd>& tau) {
  const double sign = cfg.rho_shape == RhoShape::Rho1 ? -1.0 : 1.0;
  return (2.0 * std::numbers::pi * tau.array()).sin().square() *
         (0.6 * sign * cfg.rho_scale);
}

DgpTruth make_truth(const DgpConfig& cfg,
                    const Eigen::Ref<const Eigen::VectorXd>& tau) {
  DgpTruth truth;
  truth.rho = rho_curve(cfg, tau);
  truth.beta1 = 4.0 * tau;
  truth.beta2 = (tau.array() + 1.0).square();
  truth.beta3_curve = -5.0 + cfg.c * tau.array().exp();
  const double omega =
      cfg.beta4_shape == Beta4Shape::Sin2PiTau ? 2.0 : 1.0;
  truth.beta4_curve =
      5.0 + cfg.c * (omega * std::numbers::pi * tau.array()).sin();
  return truth;
}

}  // namespace

double draw_error(Rng& rng, ErrorLaw law) {
  switch (law) {
    case ErrorLaw::Normal: {
      std::normal_distribution<double> d(0.0, 1.0);
      return d(rng);
    }
    case ErrorLaw::Uniform: {
      std::uniform_real_distribution<double> d(-std::sqrt(3.0),
                                               std::sqrt(3.0));
      return d(rng);
    }
    case ErrorLaw::ChiSq: {
      // (1/2) chi^2(2) - 1 is Exp(1) - 1: mean 0, variance 1.
      std::exponential_distribution<double> d(1.0);
      return d(rng) - 1.0;
    }
  }
  return 0.0;
}

SimulatedPanel generate(const DgpConfig& cfg, int replicate) {
  const int n = cfg.n();
  const int t_len = cfg.t_len;
  const int nt = n * t_len;

  SimulatedPanel out;
  out.weights = row_standardize(build_lattice_weights(cfg.m, cfg.scheme));
  out.spec = ModelSpec{{0, 1}, {2, 3}, 0};

  Eigen::VectorXd tau(t_len);
  for (int t = 0; t < t_len; ++t)
    tau(t) = static_cast<double>(t + 1) / t_len;
  out.truth = make_truth(cfg, tau);

  Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(replicate));
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  std::uniform_real_distribution<double> unif01(0.0, 1.0);

  Eigen::MatrixXd x(nt, 4);
  x.col(0).setOnes();
  for (int c = 1; c <= 3; ++c)
    for (int i = 0; i < nt; ++i) x(i, c) = stdnorm(rng);

  Eigen::VectorXd alpha_full(n);
  {
    Eigen::VectorXd psi(n - 1);
    for (int i = 0; i < n - 1; ++i) psi(i) = unif01(rng);
    alpha_full(0) = -psi.sum();
    alpha_full.tail(n - 1) = psi;
  }

  Eigen::VectorXd eps(nt);
  for (int i = 0; i < nt; ++i)
    eps(i) = cfg.noise_scale * draw_error(rng, cfg.error_law);

  Eigen::VectorXd y(nt);
  for (int t = 0; t < t_len; ++t) {
    const Eigen::VectorXd b =
        x.col(0).segment(t * n, n) * out.truth.beta1(t) +
        x.col(1).segment(t * n, n) * out.truth.beta2(t) +
        x.col(2).segment(t * n, n) * out.truth.beta3_curve(t) +
        x.col(3).segment(t * n, n) * out.truth.beta4_curve(t);
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) -
                              out.truth.rho(t) * out.weights.values;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
      throw DgpSingular("I - rho(tau_t) W is singular at t=" +
                        std::to_string(t + 1));
    y.segment(t * n, n) = lu.solve((b + alpha_full + eps.segment(t * n, n)).eval());
  }

  out.data = PanelData::make(std::move(y), std::move(x), n, t_len);
  return out;
}

McSummary mc_estimation(const DgpConfig& cfg, int n_sim, int workers,
                        bool keep_curves) {
  if (n_sim < 1) throw DimensionError("n_sim must be at least 1");
  const int t_len = cfg.t_len;

  McSummary s;
  s.n_sim = n_sim;
  s.config = cfg;
  s.beta3_hats.resize(n_sim);
  s.beta4_hats.resize(n_sim);
  Eigen::MatrixXd rho_hats(n_sim, t_len);
  Eigen::MatrixXd beta1_hats(n_sim, t_len);
  Eigen::MatrixXd beta2_hats(n_sim, t_len);

  const KernelSpec kernel;
  parallel_for(n_sim, resolve_workers(workers), [&](int i) {
    try {
      const SimulatedPanel sim = generate(cfg, i);
      const FitResult f =
          fit(sim.data, sim.spec, sim.weights, kernel);
      rho_hats.row(i) = f.gamma_v.col(0).transpose();
      beta1_hats.row(i) = f.gamma_v.col(1).transpose();
      beta2_hats.row(i) = f.gamma_v.col(2).transpose();
      s.beta3_hats(i) = f.beta_c(0);
      s.beta4_hats(i) = f.beta_c(1);
    } catch (const Error& e) {
      throw Error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });

  Eigen::VectorXd tau(t_len);
  for (int t = 0; t < t_len; ++t)
    tau(t) = static_cast<double>(t + 1) / t_len;
  const DgpTruth truth = make_truth(cfg, tau);
  auto amse = [&](const Eigen::MatrixXd& hats, const Eigen::VectorXd& truth_c) {
    double acc = 0.0;
    for (int t = 0; t < t_len; ++t)
      acc += (hats.col(t).array() - truth_c(t)).square().mean();
    return acc / t_len;
  };
  s.amse_rho = amse(rho_hats, truth.rho);
  s.amse_beta1 = amse(beta1_hats, truth.beta1);
  s.amse_beta2 = amse(beta2_hats, truth.beta2);

  // Bias against the time-averaged truth (exactly -5 and 5 when c = 0).
  s.bias_beta3 = s.beta3_hats.mean() - truth.beta3_curve.mean();
  s.bias_beta4 = s.beta4_hats.mean() - truth.beta4_curve.mean();
  auto sample_sd = [](const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt((v.array() - v.mean()).square().sum() / (v.size() - 1));
  };
  s.sd_beta3 = sample_sd(s.beta3_hats);
  s.sd_beta4 = sample_sd(s.beta4_hats);

  s.true_curves.resize(t_len, 3);
  s.true_curves.col(0) = truth.rho;
  s.true_curves.col(1) = truth.beta1;
  s.true_curves.col(2) = truth.beta2;
  s.mean_curves.resize(t_len, 3);
  s.mean_curves.col(0) = rho_hats.colwise().mean().transpose();
  s.mean_curves.col(1) = beta1_hats.colwise().mean().transpose();
  s.mean_curves.col(2) = beta2_hats.colwise().mean().transpose();

  if (keep_curves) {
    s.rho_hats = std::move(rho_hats);
    s.beta1_hats = std::move(beta1_hats);
    s.beta2_hats = std::move(beta2_hats);
  }
  return s;
}

namespace {

Eigen::VectorXd mc_pvalues(const DgpConfig& cfg, int n_sim, int k,
                           int workers) {
  Eigen::VectorXd pvals(n_sim);
  const KernelSpec kernel;
  parallel_for(n_sim, resolve_workers(workers), [&](int i) {
    try {
      const SimulatedPanel sim = generate(cfg, i);
      const Bandwidth h = rot_bandwidth(sim.data.n, sim.data.t_len);
      const Stage1Fit s1 = stage1_fit(sim.data, sim.weights, h, kernel);
      const FitResult f = stage2_fit(sim.data, sim.spec, s1, h, kernel);
      const TvFitResult tv = fit_full_tv(sim.data, s1, h, kernel);
      TestConfig tc;
      tc.n_bootstrap = k;
      tc.seed = mix_seed(cfg.seed,
                         kBootstrapStreamBase + static_cast<std::uint64_t>(i));
      tc.parallel = 1;  // replicate-level parallelism only
      pvals(i) = bootstrap_test(sim.data, sim.spec, sim.weights, kernel, f, tv,
                                tc).p_value;
    } catch (const Error& e) {
      throw Error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  return pvals;
}

}  // namespace

std::vector<double> mc_size(const DgpConfig& cfg, int n_sim, int k,
                            const std::vector<double>& alphas, int workers) {
  if (cfg.c != 0.0)
    throw DimensionError("size experiments require c = 0 (the null)");
  const Eigen::VectorXd pvals = mc_pvalues(cfg, n_sim, k, workers);
  std::vector<double> rates;
  rates.reserve(alphas.size());
  for (double a : alphas)
    rates.push_back(
        static_cast<double>((pvals.array() < a).count()) / n_sim);
  return rates;
}

double mc_power(const DgpConfig& cfg, int n_sim, int k, double alpha,
                int workers) {
  if (!(cfg.c > 0.0))
    throw DimensionError("power experiments require c > 0");
  const Eigen::VectorXd pvals = mc_pvalues(cfg, n_sim, k, workers);
  return static_cast<double>((pvals.array() < alpha).count()) / n_sim;
}

}  // namespace tvsar
