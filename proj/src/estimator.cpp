#include "tvsar/estimator.hpp"

#include <cmath>
#include <string>

namespace tvsar {

namespace {

constexpr double kRcondGate = 1e-12;

// Y_w_hat = B_hat + D psi_hat with psi_hat = (D^T D)^{-1} D^T (y_w - B_hat).
Eigen::VectorXd stage1_predict(const FixedEffectsDesign& fe,
                               const Eigen::Ref<const Eigen::VectorXd>& y_w,
                               const LocalSmoother& s_h,
                               Eigen::VectorXd* psi_out) {
  const Eigen::VectorXd b_hat = s_h.apply(y_w);
  const Eigen::VectorXd psi = fe.dtd_solve(fe.dt_apply(y_w - b_hat));
  if (psi_out) *psi_out = psi;
  return b_hat + fe.d_apply(psi);
}

Eigen::MatrixXd with_lead_column(const Eigen::Ref<const Eigen::VectorXd>& lead,
                                 const Eigen::Ref<const Eigen::MatrixXd>& rest) {
  Eigen::MatrixXd out(lead.size(), rest.cols() + 1);
  out.col(0) = lead;
  out.rightCols(rest.cols()) = rest;
  return out;
}

struct PlSolve {
  Eigen::VectorXd beta_c;     // empty when q = p
  Eigen::VectorXd residuals;  // Y_bar - X_c_bar beta_c
  Eigen::VectorXd y_tilde;    // (I - S) Y
  Eigen::MatrixXd xc_tilde;   // (I - S) X_c
};

// The profile least-squares core: sweep S(h) and P_D out of Y and X_c, then
// regress. Shared by stage2_fit and the bootstrap refits.
PlSolve solve_profile(const FixedEffectsDesign& fe, const LocalSmoother& s_pl,
                      const Eigen::Ref<const Eigen::VectorXd>& y,
                      const Eigen::Ref<const Eigen::MatrixXd>& x_c) {
  PlSolve out;
  out.y_tilde = y - s_pl.apply(y);
  const Eigen::VectorXd y_bar = out.y_tilde - fe.pd_apply(out.y_tilde);
  if (x_c.cols() == 0) {
    out.residuals = y_bar;
    return out;
  }
  out.xc_tilde = x_c - s_pl.apply(x_c);
  const Eigen::MatrixXd xc_bar = out.xc_tilde - fe.pd_apply(out.xc_tilde);
  const Eigen::MatrixXd gram = xc_bar.transpose() * xc_bar;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < kRcondGate)
    throw CollinearConstantBlock(
        "constant-block regressors are collinear after profiling");
  out.beta_c = ldlt.solve(xc_bar.transpose() * y_bar);
  out.residuals = y_bar - xc_bar * out.beta_c;
  return out;
}

}  // namespace

InstrumentSet build_instruments(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                const TimeBlockOperator& w_big) {
  const auto p = static_cast<int>(x.cols());
  if (p < 2)
    throw InsufficientRegressors(
        "instrument construction needs p >= 2 regressors, got p=" +
        std::to_string(p));
  if (x.rows() != w_big.size())
    throw DimensionError("design matrix rows must equal N*T");
  InstrumentSet out;
  out.p = p;
  out.h_matrix.resize(x.rows(), 3 * p - 2);
  out.h_matrix.leftCols(p) = x;
  const auto rest = x.rightCols(p - 1);
  const Eigen::MatrixXd wx = w_big.apply(rest);
  out.h_matrix.middleCols(p, p - 1) = wx;
  out.h_matrix.rightCols(p - 1) = w_big.apply(wx);
  return out;
}

Stage1Fit stage1_fit(const PanelData& data, const SpatialWeights& w,
                     Bandwidth h, const KernelSpec& kernel) {
  const TimeBlockOperator w_big = expand_over_time(w, data.t_len);
  const FixedEffectsDesign fe(data.n, data.t_len);
  const Eigen::VectorXd y_w = spatial_lag(w_big, data.y);
  const InstrumentSet inst = build_instruments(data.x, w_big);

  Stage1Fit out;
  try {
    out.smoother = build_smoother(inst.h_matrix, data.tau, h, fe, kernel);
  } catch (const SingularLocalSystem& e) {
    throw SingularLocalSystem(e.tau0(),
                              std::string("stage 1: ") + e.what());
  }
  out.eta_curves = out.smoother.curves(y_w);
  out.y_w_hat = stage1_predict(fe, y_w, out.smoother, &out.psi_hat);
  return out;
}

FitResult stage2_fit(const PanelData& data, const ModelSpec& spec,
                     const Stage1Fit& stage1, Bandwidth h,
                     const KernelSpec& kernel) {
  spec.validate(data.p());
  const FixedEffectsDesign fe(data.n, data.t_len);
  const Eigen::MatrixXd x_v = spec.varying_block(data.x);
  const Eigen::MatrixXd x_c = spec.constant_block(data.x);
  const Eigen::MatrixXd z_v = with_lead_column(stage1.y_w_hat, x_v);

  LocalSmoother s_pl;
  try {
    s_pl = build_smoother(z_v, data.tau, h, fe, kernel);
  } catch (const SingularLocalSystem& e) {
    throw SingularLocalSystem(e.tau0(),
                              std::string("stage 2: ") + e.what());
  }

  const PlSolve pl = solve_profile(fe, s_pl, data.y, x_c);

  FitResult out;
  out.beta_c = pl.beta_c;
  out.residuals = pl.residuals;
  out.rss = pl.residuals.squaredNorm();
  out.bandwidth = h;
  out.stage1 = stage1;

  // alpha_hat = (D^T D)^{-1} D^T (Y_tilde - X_c_tilde beta_c), completed to N.
  Eigen::VectorXd swept = pl.y_tilde;
  if (x_c.cols() > 0) swept -= pl.xc_tilde * pl.beta_c;
  out.alpha = fe.complete_effects(fe.dtd_solve(fe.dt_apply(swept)));

  Eigen::VectorXd centered = data.y;
  if (x_c.cols() > 0) centered -= x_c * pl.beta_c;
  out.gamma_v = s_pl.curves(centered);

  out.max_abs_rho = out.gamma_v.col(0).cwiseAbs().maxCoeff();
  out.rho_outside_unit = out.max_abs_rho >= 1.0;
  return out;
}

TvFitResult fit_full_tv(const PanelData& data, const Stage1Fit& stage1,
                        Bandwidth h, const KernelSpec& kernel) {
  const FixedEffectsDesign fe(data.n, data.t_len);
  const Eigen::MatrixXd z = with_lead_column(stage1.y_w_hat, data.x);
  LocalSmoother s_tv;
  try {
    s_tv = build_smoother(z, data.tau, h, fe, kernel);
  } catch (const SingularLocalSystem& e) {
    throw SingularLocalSystem(e.tau0(),
                              std::string("time-varying model: ") + e.what());
  }
  TvFitResult out;
  const Eigen::VectorXd swept = data.y - s_tv.apply(data.y);
  out.alpha = fe.complete_effects(fe.dtd_solve(fe.dt_apply(swept)));
  out.residuals = swept - fe.pd_apply(swept);
  out.rss = out.residuals.squaredNorm();
  out.gamma_full = s_tv.curves(data.y);
  return out;
}

FitResult fit(const PanelData& data, const ModelSpec& spec,
              const SpatialWeights& w, const KernelSpec& kernel,
              std::optional<Bandwidth> h) {
  const Bandwidth hh = h ? *h : rot_bandwidth(data.n, data.t_len);
  const Stage1Fit s1 = stage1_fit(data, w, hh, kernel);
  return stage2_fit(data, spec, s1, hh, kernel);
}

std::pair<double, double> refit_rss(
    const Eigen::Ref<const Eigen::VectorXd>& y_new, const PanelData& data,
    const ModelSpec& spec, const TimeBlockOperator& w_big,
    const LocalSmoother& stage1_smoother, Bandwidth h,
    const KernelSpec& kernel) {
  const FixedEffectsDesign fe(data.n, data.t_len);
  const Eigen::VectorXd y_w = w_big.apply(y_new);
  const Eigen::VectorXd y_w_hat =
      stage1_predict(fe, y_w, stage1_smoother, nullptr);

  const Eigen::MatrixXd x_v = spec.varying_block(data.x);
  const Eigen::MatrixXd x_c = spec.constant_block(data.x);

  const Eigen::MatrixXd z_v = with_lead_column(y_w_hat, x_v);
  const LocalSmoother s_pl = build_smoother(z_v, data.tau, h, fe, kernel);
  const PlSolve pl = solve_profile(fe, s_pl, y_new, x_c);
  const double rss_pl = pl.residuals.squaredNorm();

  const Eigen::MatrixXd z = with_lead_column(y_w_hat, data.x);
  const LocalSmoother s_tv = build_smoother(z, data.tau, h, fe, kernel);
  const Eigen::VectorXd swept = y_new - s_tv.apply(y_new);
  const Eigen::VectorXd eps_tv = swept - fe.pd_apply(swept);
  return {rss_pl, eps_tv.squaredNorm()};
}

}  // namespace tvsar
