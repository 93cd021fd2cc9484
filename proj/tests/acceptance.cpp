// Acceptance suite: one criterion per --criterion N (1..8), all by default.
// Prints one PASS/FAIL line per criterion. Exit codes: 0 all pass, 1 any
// fail, 77 when the only selected criterion was skipped for missing data.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "test_data.hpp"
#include "test_util.hpp"
#include "tvsar/csv.hpp"
#include "tvsar/estimator.hpp"
#include "tvsar/gof.hpp"
#include "tvsar/parallel.hpp"
#include "tvsar/sim.hpp"

using namespace tvsar;

namespace {

struct Checker {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void in_band(double value, double lo, double hi, const std::string& name) {
    std::ostringstream os;
    os << name << "=" << value << " not in [" << lo << ", " << hi << "]";
    expect(value >= lo && value <= hi, os.str());
  }
};

int workers() { return resolve_workers(0); }

// ---------------------------------------------------------------- criterion 1

bool criterion_oracle() {
  Checker ck;
  const KernelSpec kernel;
  for (int m : {2, 3}) {
    for (int t_len : {3, 5}) {
      for (std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
        // p is capped by the stage-1 identification bound
        // NT - (N-1) >= 2(3p-2): p=2 at N=4, p=3 at N=9.
        const int p = m == 2 ? 2 : 3;
        const testdata::SmallPanel sim =
            testdata::small_sar_panel(seed, m, t_len, p);
        const Bandwidth h = rot_bandwidth(sim.data.n, sim.data.t_len);

        const Stage1Fit s1 = stage1_fit(sim.data, sim.weights, h, kernel);
        const FitResult f = stage2_fit(sim.data, sim.spec, s1, h, kernel);
        const TvFitResult tv = fit_full_tv(sim.data, s1, h, kernel);
        const double w_obs =
            w_statistic(f.rss, tv.rss, sim.data.n, sim.data.t_len);

        const oracle::DensePipeline ref = oracle::dense_fit(
            sim.data.y, sim.data.x, sim.spec.varying_cols,
            sim.spec.constant_cols, sim.weights.values, sim.data.t_len, h.h);

        const std::string tag = " (m=" + std::to_string(m) +
                                ",T=" + std::to_string(t_len) +
                                ",seed=" + std::to_string(seed) + ")";
        auto close = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         const char* name) {
          ck.expect(testutil::rel_err(a, b) < 1e-8,
                    std::string(name) + " mismatch" + tag);
        };
        close(s1.eta_curves, ref.eta_curves, "eta_hat");
        close(s1.psi_hat, ref.psi_hat, "psi_hat");
        close(s1.y_w_hat, ref.y_w_hat, "y_w_hat");
        close(s1.smoother.dense(), ref.s_h, "S_H blocks");
        close(f.beta_c, ref.beta_c, "beta_c");
        close(f.gamma_v, ref.gamma_v, "gamma_v");
        close(f.alpha.tail(sim.data.n - 1), ref.alpha, "alpha");
        close(f.residuals, ref.eps_pl, "eps_PL");
        ck.expect(testutil::rel_err(f.rss, ref.rss_pl) < 1e-8,
                  "RSS_PL mismatch" + tag);
        ck.expect(testutil::rel_err(tv.rss, ref.rss_tv) < 1e-8,
                  "RSS_TV mismatch" + tag);
        ck.expect(testutil::rel_err(w_obs, ref.w_stat) < 1e-8,
                  "W mismatch" + tag);
      }
    }
  }
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 1: dense-oracle equivalence on 20 seeded "
               "instances";
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ------------------------------------------------------------ criteria 2 & 3

McSummary table12_cell(int n_sim) {
  DgpConfig cfg;
  cfg.m = 12;
  cfg.t_len = 10;
  cfg.scheme = Contiguity::Rook;
  cfg.rho_shape = RhoShape::Rho1;
  cfg.error_law = ErrorLaw::Normal;
  cfg.seed = 1;
  return mc_estimation(cfg, n_sim, workers());
}

bool criterion_table1() {
  const McSummary s = table12_cell(100);
  Checker ck;
  ck.in_band(s.amse_rho, 0.0026, 0.0104, "AMSE(rho)");
  ck.in_band(s.amse_beta1, 0.004, 0.018, "AMSE(beta1)");
  ck.in_band(s.amse_beta2, 0.0036, 0.0144, "AMSE(beta2)");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 2: Table-1 cell (rho1, rook, normal, T=10, N=144)"
            << " AMSE rho=" << s.amse_rho << " beta1=" << s.amse_beta1
            << " beta2=" << s.amse_beta2;
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

bool criterion_table2() {
  const McSummary s = table12_cell(100);
  Checker ck;
  ck.in_band(s.bias_beta3, -0.045, -0.010, "bias(beta3)");
  ck.in_band(s.sd_beta3, 0.015, 0.060, "SD(beta3)");
  ck.in_band(s.bias_beta4, 0.010, 0.045, "bias(beta4)");
  ck.in_band(s.sd_beta4, 0.015, 0.060, "SD(beta4)");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 3: Table-2 cell bias/SD beta3=(" << s.bias_beta3
            << ", " << s.sd_beta3 << ") beta4=(" << s.bias_beta4 << ", "
            << s.sd_beta4 << ")";
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_size() {
  DgpConfig cfg;
  cfg.m = 8;
  cfg.t_len = 3;
  cfg.scheme = Contiguity::Rook;
  cfg.rho_shape = RhoShape::Rho1;
  cfg.error_law = ErrorLaw::Normal;
  cfg.seed = 1;
  const std::vector<double> rates =
      mc_size(cfg, 100, 200, {0.05, 0.10}, workers());
  Checker ck;
  ck.in_band(rates[0], 0.01, 0.10, "size@0.05");
  ck.in_band(rates[1], 0.04, 0.18, "size@0.10");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 4: empirical size (3,64) rook rho1 normal:"
            << " alpha=0.05 -> " << rates[0] << ", alpha=0.10 -> " << rates[1];
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_power() {
  DgpConfig cfg;
  cfg.m = 10;
  cfg.t_len = 5;
  cfg.scheme = Contiguity::Rook;
  cfg.rho_shape = RhoShape::Rho1;
  cfg.error_law = ErrorLaw::Normal;
  cfg.seed = 1;

  cfg.c = 0.5;
  const double power_half = mc_power(cfg, 50, 200, 0.05, workers());
  cfg.c = 0.3;
  const double power_third = mc_power(cfg, 50, 200, 0.05, workers());

  Checker ck;
  ck.expect(power_half >= 0.8, "power(c=0.5) below 0.8");
  ck.expect(power_half >= power_third,
            "power(c=0.5) below power(c=0.3) at matched seeds");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 5: power (5,100) alpha=0.05: c=0.5 -> "
            << power_half << ", c=0.3 -> " << power_third;
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ---------------------------------------------------------------- criterion 6

bool criterion_invariants() {
  Checker ck;
  const KernelSpec kernel;
  Rng rng = make_stream(6, 0);
  std::normal_distribution<double> nd(0.0, 1.0);

  const int n = 5, t_len = 4;
  const FixedEffectsDesign fe(n, t_len);
  Eigen::VectorXd tau(t_len);
  for (int t = 0; t < t_len; ++t) tau(t) = (t + 1.0) / t_len;
  const Bandwidth h = rot_bandwidth(n, t_len);

  // K(tau0) D annihilation at every grid point, 100 random psi
  for (int t = 0; t < t_len; ++t) {
    const Eigen::VectorXd w = kernel_weight_vector(tau, tau(t), h, n, kernel);
    for (int rep = 0; rep < 25; ++rep) {
      Eigen::VectorXd psi(n - 1);
      for (int i = 0; i < n - 1; ++i) psi(i) = nd(rng);
      const Eigen::VectorXd proj =
          within_projection_apply(fe, w, fe.d_apply(psi));
      ck.expect(proj.cwiseAbs().maxCoeff() <
                    1e-9 * std::max(1.0, psi.cwiseAbs().maxCoeff()),
                "K(tau0) D psi != 0");
    }
  }

  // S(h) D = 0 and (I - P_D)(I - S) D = 0
  Eigen::MatrixXd z(n * t_len, 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = nd(rng);
  const LocalSmoother s = build_smoother(z, tau, h, fe, kernel);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd psi(n - 1);
    for (int i = 0; i < n - 1; ++i) psi(i) = nd(rng);
    const Eigen::VectorXd d_psi = fe.d_apply(psi);
    const double scale = std::max(1.0, d_psi.cwiseAbs().maxCoeff());
    ck.expect(s.apply(d_psi).cwiseAbs().maxCoeff() < 1e-9 * scale,
              "S(h) D psi != 0");
    const Eigen::VectorXd swept = d_psi - s.apply(d_psi);
    ck.expect((swept - fe.pd_apply(swept)).cwiseAbs().maxCoeff() <
                  1e-9 * scale,
              "(I-P_D)(I-S) D psi != 0");
  }

  // weight-scale invariance of the local fit (dense check, factor 7)
  {
    Eigen::VectorXd y(n * t_len);
    for (int i = 0; i < y.size(); ++i) y(i) = nd(rng);
    const Eigen::VectorXd w = kernel_weight_vector(tau, tau(1), h, n, kernel);
    const Eigen::MatrixXd m = local_design(z, tau, tau(1), h);
    auto dense_fit_w = [&](const Eigen::VectorXd& w_diag) {
      const Eigen::MatrixXd k = oracle::dense_projection(n, t_len, w_diag);
      const Eigen::MatrixXd w_star =
          k.transpose() * Eigen::MatrixXd(w_diag.asDiagonal()) * k;
      return Eigen::VectorXd((m.transpose() * w_star * m).inverse() *
                             m.transpose() * w_star * y);
    };
    ck.expect(testutil::rel_err(dense_fit_w(w), dense_fit_w(7.0 * w)) < 1e-10,
              "kernel scale leaks into the local fit");
  }

  // local-linear exactness
  {
    Eigen::VectorXd a0(2), b0(2), psi(n - 1);
    for (int i = 0; i < 2; ++i) {
      a0(i) = nd(rng);
      b0(i) = nd(rng);
    }
    for (int i = 0; i < n - 1; ++i) psi(i) = nd(rng);
    const Eigen::MatrixXd m = local_design(z, tau, tau(2), h);
    Eigen::VectorXd coef(4);
    coef << a0, b0;
    const Eigen::VectorXd resp = m * coef + fe.d_apply(psi);
    const auto [a, b] = local_linear_fit(z, resp, tau, tau(2), h, fe, kernel);
    ck.expect((a - a0).cwiseAbs().maxCoeff() < 1e-8 &&
                  (b - b0).cwiseAbs().maxCoeff() < 1e-8,
              "local-linear exactness fails");
  }

  // q = p nesting equivalence
  {
    const testdata::SmallPanel sim = testdata::small_sar_panel(66, 2, 4);
    const Bandwidth hh = rot_bandwidth(sim.data.n, sim.data.t_len);
    const Stage1Fit s1 = stage1_fit(sim.data, sim.weights, hh, kernel);
    const ModelSpec all_varying{{0, 1}, {}, 0};
    const FitResult f = stage2_fit(sim.data, all_varying, s1, hh, kernel);
    const TvFitResult tv = fit_full_tv(sim.data, s1, hh, kernel);
    ck.expect(testutil::rel_err(f.gamma_v, tv.gamma_full) < 1e-9 &&
                  testutil::rel_err(f.rss, tv.rss) < 1e-9,
              "q=p nesting equivalence fails");
  }

  // bootstrap determinism across worker counts
  {
    const testdata::SmallPanel sim = testdata::small_sar_panel(5, 2, 3);
    const Bandwidth hh = rot_bandwidth(sim.data.n, sim.data.t_len);
    const Stage1Fit s1 = stage1_fit(sim.data, sim.weights, hh, kernel);
    const FitResult f = stage2_fit(sim.data, sim.spec, s1, hh, kernel);
    const TvFitResult tv = fit_full_tv(sim.data, s1, hh, kernel);
    TestConfig tc;
    tc.n_bootstrap = 16;
    tc.seed = 99;
    tc.parallel = 1;
    const TestResult base =
        bootstrap_test(sim.data, sim.spec, sim.weights, kernel, f, tv, tc);
    for (int wk : {2, 4, 8}) {
      tc.parallel = wk;
      const TestResult other =
          bootstrap_test(sim.data, sim.spec, sim.weights, kernel, f, tv, tc);
      ck.expect(
          (base.w_bootstrap - other.w_bootstrap).cwiseAbs().maxCoeff() == 0.0,
          "bootstrap differs at " + std::to_string(wk) + " workers");
    }
  }

  // error-law moments at 1e6 draws
  for (ErrorLaw law : {ErrorLaw::Normal, ErrorLaw::Uniform, ErrorLaw::ChiSq}) {
    Rng lrng = make_stream(1234, static_cast<std::uint64_t>(law));
    double sum = 0.0, sumsq = 0.0;
    const int n_draws = 1'000'000;
    for (int i = 0; i < n_draws; ++i) {
      const double x = draw_error(lrng, law);
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / n_draws;
    const double var = sumsq / n_draws - mean * mean;
    ck.expect(std::abs(mean) < 3e-3 && std::abs(var - 1.0) < 1e-2,
              "error-law moments off for law " +
                  std::to_string(static_cast<int>(law)));
  }

  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 6: invariant suite (annihilation, smoother "
               "algebra, exactness, nesting, determinism, moments)";
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ---------------------------------------------------------------- criterion 7

std::optional<bool> criterion_empirical() {
  const char* panel_env = std::getenv("TVSAR_CARBON_PANEL");
  const char* weights_env = std::getenv("TVSAR_CARBON_WEIGHTS");
  const std::string panel_path =
      panel_env ? panel_env : "data/carbon_panel.csv";
  const std::string weights_path =
      weights_env ? weights_env : "data/carbon_weights.csv";
  if (!std::filesystem::exists(panel_path) ||
      !std::filesystem::exists(weights_path)) {
    std::cout << "SKIP criterion 7: carbon dataset not present (" << panel_path
              << ", " << weights_path << ")" << std::endl;
    return std::nullopt;
  }

  PanelLayout layout;
  layout.response_col = "PC";
  layout.covariate_cols = {"PR", "ER", "PG", "IR"};
  const LoadedPanel panel = load_panel_csv(panel_path, layout);
  const SpatialWeights w = row_standardize(load_weights_csv(weights_path));

  // X = [1, PR, ER, PG, IR]: intercept, PR, ER varying; PG, IR constant.
  const ModelSpec spec{{0, 1, 2}, {3, 4}, 0};
  const KernelSpec kernel;
  const Bandwidth h = rot_bandwidth(panel.data.n, panel.data.t_len);
  const Stage1Fit s1 = stage1_fit(panel.data, w, h, kernel);
  const FitResult f = stage2_fit(panel.data, spec, s1, h, kernel);
  const TvFitResult tv = fit_full_tv(panel.data, s1, h, kernel);
  TestConfig tc;
  tc.n_bootstrap = 500;
  tc.seed = 1;
  tc.parallel = workers();
  const TestResult res =
      bootstrap_test(panel.data, spec, w, kernel, f, tv, tc);

  Checker ck;
  ck.in_band(f.beta_c(0), 0.1585 - 0.0005, 0.1585 + 0.0005, "beta3(PG)");
  ck.in_band(f.beta_c(1), 1.2111 - 0.0005, 1.2111 + 0.0005, "beta4(IR)");
  ck.in_band(res.p_value, 0.15, 0.26, "bootstrap p");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 7: carbon application beta3=" << f.beta_c(0)
            << " beta4=" << f.beta_c(1) << " p=" << res.p_value;
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

// ---------------------------------------------------------------- criterion 8

bool criterion_scaling() {
  DgpConfig small;
  small.m = 10;
  small.t_len = 5;
  small.seed = 1;
  DgpConfig large = small;
  large.m = 12;
  large.t_len = 10;

  const McSummary lo = mc_estimation(small, 50, workers());
  const McSummary hi = mc_estimation(large, 50, workers());

  Checker ck;
  ck.expect(hi.amse_rho < lo.amse_rho, "AMSE(rho) does not shrink");
  ck.expect(hi.amse_beta1 < lo.amse_beta1, "AMSE(beta1) does not shrink");
  ck.expect(hi.amse_beta2 < lo.amse_beta2, "AMSE(beta2) does not shrink");
  ck.expect(hi.sd_beta3 < lo.sd_beta3, "SD(beta3) does not shrink");
  ck.expect(hi.sd_beta4 < lo.sd_beta4, "SD(beta4) does not shrink");
  std::cout << (ck.ok ? "PASS" : "FAIL")
            << " criterion 8: (10,144) beats (5,100) — AMSE rho "
            << hi.amse_rho << "<" << lo.amse_rho << ", SD beta3 "
            << hi.sd_beta3 << "<" << lo.sd_beta3;
  if (!ck.ok) std::cout << " [" << ck.detail.str() << "]";
  std::cout << std::endl;
  return ck.ok;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc)
      selected = std::atoi(argv[++i]);
  }

  bool any_fail = false;
  bool only_skipped = selected == 7;
  auto run = [&](int idx, auto&& fn) {
    if (selected != 0 && selected != idx) return;
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_same_v<decltype(fn()), std::optional<bool>>) {
      const std::optional<bool> r = fn();
      if (r.has_value()) {
        only_skipped = false;
        if (!*r) any_fail = true;
      }
    } else {
      only_skipped = false;
      if (!fn()) any_fail = true;
    }
    const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cout << "  (criterion " << idx << " took " << dt << " ms)"
              << std::endl;
  };

  run(1, criterion_oracle);
  run(2, criterion_table1);
  run(3, criterion_table2);
  run(4, criterion_size);
  run(5, criterion_power);
  run(6, criterion_invariants);
  run(7, criterion_empirical);
  run(8, criterion_scaling);

  if (any_fail) return 1;
  if (selected == 7 && only_skipped) return 77;
  return 0;
}
