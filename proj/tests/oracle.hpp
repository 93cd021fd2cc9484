#pragma once

// Dense, literal-formula reference implementation of the two-stage pipeline.
// Every matrix is materialized and every inverse is explicit; nothing here
// shares code with the optimized library path it checks.

#include <Eigen/Dense>
#include <vector>

namespace oracle {

struct DensePipeline {
  // stage 1
  Eigen::MatrixXd h;           // NT x (3p-2) instruments
  Eigen::VectorXd y_w;         // W * Y
  Eigen::MatrixXd s_h;         // NT x NT instrument smoother
  Eigen::MatrixXd eta_curves;  // T x (3p-2)
  Eigen::VectorXd psi_hat;     // N-1
  Eigen::VectorXd y_w_hat;     // NT
  // stage 2 (partially linear)
  Eigen::MatrixXd s_pl;      // NT x NT
  Eigen::VectorXd beta_c;    // p-q
  Eigen::MatrixXd gamma_v;   // T x (q+1)
  Eigen::VectorXd alpha;     // N-1
  Eigen::VectorXd eps_pl;    // NT
  double rss_pl = 0.0;
  // fully time-varying
  Eigen::MatrixXd s_tv;    // NT x NT
  Eigen::VectorXd eps_tv;  // NT
  double rss_tv = 0.0;
  double w_stat = 0.0;
};

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// D = 1_T (x) (-1_{N-1}, I_{N-1})^T, fully materialized.
Eigen::MatrixXd dummy_design(int n, int t_len);

/// Dense K(tau0) = I - D (D' W_h D)^{-1} D' W_h for an arbitrary NT weight
/// diagonal.
Eigen::MatrixXd dense_projection(int n, int t_len,
                                 const Eigen::VectorXd& w_diag);

/// Dense smoother over Z with Gaussian weights, plus the stacked
/// Phi(tau_t) blocks (T blocks of r x NT, stacked vertically).
void dense_smoother(const Eigen::MatrixXd& z, const Eigen::VectorXd& tau,
                    double h, int n, Eigen::MatrixXd* s_out,
                    Eigen::MatrixXd* phi_out);

/// The whole pipeline: instruments, stage-1 LLDV, stage-2 profile estimation,
/// the fully time-varying fit, and the test statistic. w_n must already be
/// row-standardized when the caller wants the model's usual weighting.
DensePipeline dense_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        const std::vector<int>& varying_cols,
                        const std::vector<int>& constant_cols,
                        const Eigen::MatrixXd& w_n, int t_len, double h);

}  // namespace oracle
