#include "tvsar/gof.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "tvsar/parallel.hpp"
#include "tvsar/rng.hpp"

namespace tvsar {

double w_statistic(double rss_pl, double rss_tv, int n, int t_len) {
  if (!(rss_tv > 0.0))
    throw InvalidRss("RSS_TV must be positive, got " + std::to_string(rss_tv));
  return 0.5 * n * t_len * (rss_pl - rss_tv) / rss_tv;
}

TestResult bootstrap_test(const PanelData& data, const ModelSpec& spec,
                          const SpatialWeights& w, const KernelSpec& kernel,
                          const FitResult& fit, const TvFitResult& tv,
                          const TestConfig& cfg) {
  if (cfg.n_bootstrap < 1)
    throw DimensionError("bootstrap needs at least one replicate");
  spec.validate(data.p());
  const int n = data.n;
  const int t_len = data.t_len;
  const int nt = n * t_len;
  const int q = spec.q();

  const double w_obs = w_statistic(fit.rss, tv.rss, n, t_len);

  // Step 1: center the time-varying residuals.
  Eigen::VectorXd pool = tv.residuals;
  pool.array() -= pool.mean();

  // Null-model mean: B(X_v, beta_v_hat) + X_c beta_c_hat + D alpha_hat.
  // alpha is stored completed, so the D-term block is alpha itself.
  const Eigen::MatrixXd x_v = spec.varying_block(data.x);
  const Eigen::MatrixXd x_c = spec.constant_block(data.x);
  Eigen::VectorXd mu(nt);
  for (int t = 0; t < t_len; ++t) {
    const Eigen::VectorXd beta_v = fit.gamma_v.row(t).tail(q).transpose();
    mu.segment(t * n, n) = x_v.middleRows(t * n, n) * beta_v + fit.alpha;
  }
  if (x_c.cols() > 0) mu += x_c * fit.beta_c;

  // Per-period SAR factorizations (I_N - rho_hat(tau_t) W_N), shared by all
  // replicates.
  const double max_abs_rho = fit.gamma_v.col(0).cwiseAbs().maxCoeff();
  std::vector<Eigen::FullPivLU<Eigen::MatrixXd>> lus;
  lus.reserve(static_cast<std::size_t>(t_len));
  for (int t = 0; t < t_len; ++t) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) -
                              fit.gamma_v(t, 0) * w.values;
    lus.emplace_back(a);
    if (!lus.back().isInvertible())
      throw ExplosiveBootstrapDgp(
          max_abs_rho,
          "bootstrap DGP matrix I - rho_hat*W is singular at tau_t=" +
              std::to_string(data.tau(t)) +
              " (max |rho_hat| = " + std::to_string(max_abs_rho) + ")");
  }

  const TimeBlockOperator w_big = expand_over_time(w, t_len);

  TestResult out;
  out.w_observed = w_obs;
  out.k = cfg.n_bootstrap;
  out.seed = cfg.seed;
  out.w_bootstrap.resize(cfg.n_bootstrap);

  parallel_for(cfg.n_bootstrap, resolve_workers(cfg.parallel), [&](int j) {
    Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(j));
    std::uniform_int_distribution<int> pick(0, nt - 1);

    // Steps 2-3: resample residuals, regenerate Y*, refit both models.
    Eigen::VectorXd y_star(nt);
    for (int i = 0; i < nt; ++i) y_star(i) = pool(pick(rng));
    y_star += mu;
    for (int t = 0; t < t_len; ++t) {
      const Eigen::VectorXd sol =
          lus[static_cast<std::size_t>(t)].solve(y_star.segment(t * n, n));
      y_star.segment(t * n, n) = sol;
    }

    const auto [rss_pl, rss_tv] = refit_rss(
        y_star, data, spec, w_big, fit.stage1.smoother, fit.bandwidth, kernel);
    out.w_bootstrap(j) = w_statistic(rss_pl, rss_tv, n, t_len);
  });

  out.p_value =
      static_cast<double>((out.w_bootstrap.array() >= w_obs).count()) /
      cfg.n_bootstrap;
  return out;
}

Decision decide(const TestResult& result, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw DimensionError("significance level must lie in (0,1)");
  return result.p_value < alpha ? Decision::Reject : Decision::FailToReject;
}

}  // namespace tvsar
