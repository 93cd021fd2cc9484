#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "tvsar/kernel.hpp"
#include "tvsar/panel.hpp"
#include "tvsar/smoother.hpp"

namespace tvsar {

/// Instruments H = (X, W X_{(-1)}, W^2 X_{(-1)}): the design matrix plus the
/// first and second spatial lags of its non-intercept columns, 3p-2 columns.
struct InstrumentSet {
  Eigen::MatrixXd h_matrix;
  int p = 0;
};

InstrumentSet build_instruments(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                const TimeBlockOperator& w_big);

/// First-stage fit of the spatial lag Y_w on the instruments: time-varying
/// coefficient curves, concentrated fixed effects, and the instrument-based
/// prediction Y_w_hat that replaces W*Y downstream.
struct Stage1Fit {
  Eigen::MatrixXd eta_curves;  // T x (3p-2)
  Eigen::VectorXd psi_hat;     // N-1 concentrated effects
  Eigen::VectorXd y_w_hat;     // NT
  LocalSmoother smoother;      // S_H(h) over the instruments
};

Stage1Fit stage1_fit(const PanelData& data, const SpatialWeights& w,
                     Bandwidth h, const KernelSpec& kernel);

/// Second-stage profile estimates for the partially linear model.
struct FitResult {
  Eigen::VectorXd beta_c;   // p-q constant coefficients
  Eigen::MatrixXd gamma_v;  // T x (q+1); column 0 is rho_hat(tau_t)
  Eigen::VectorXd alpha;    // length N, completed so sum(alpha) = 0
  Eigen::VectorXd residuals;
  double rss = 0.0;
  Bandwidth bandwidth;
  bool rho_outside_unit = false;  // some |rho_hat(tau_t)| >= 1
  double max_abs_rho = 0.0;
  Stage1Fit stage1;
};

FitResult stage2_fit(const PanelData& data, const ModelSpec& spec,
                     const Stage1Fit& stage1, Bandwidth h,
                     const KernelSpec& kernel);

/// Fully time-varying fit (all p coefficients varying), used as the
/// goodness-of-fit alternative.
struct TvFitResult {
  Eigen::MatrixXd gamma_full;  // T x (p+1); column 0 is rho_hat(tau_t)
  Eigen::VectorXd alpha;       // length N, completed
  Eigen::VectorXd residuals;
  double rss = 0.0;
};

TvFitResult fit_full_tv(const PanelData& data, const Stage1Fit& stage1,
                        Bandwidth h, const KernelSpec& kernel);

/// The full 2SLS-PLLDV pipeline: stage 1 then stage 2, with the ROT bandwidth
/// unless one is supplied.
FitResult fit(const PanelData& data, const ModelSpec& spec,
              const SpatialWeights& w, const KernelSpec& kernel,
              std::optional<Bandwidth> h = std::nullopt);

/// Re-runs both models for a new response on the same design, reusing the
/// stage-1 instrument smoother (it depends only on X and W). Returns
/// (RSS_PL, RSS_TV) — the bootstrap hot path.
std::pair<double, double> refit_rss(
    const Eigen::Ref<const Eigen::VectorXd>& y_new, const PanelData& data,
    const ModelSpec& spec, const TimeBlockOperator& w_big,
    const LocalSmoother& stage1_smoother, Bandwidth h,
    const KernelSpec& kernel);

}  // namespace tvsar
