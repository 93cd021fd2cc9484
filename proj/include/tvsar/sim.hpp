#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tvsar/estimator.hpp"
#include "tvsar/gof.hpp"
#include "tvsar/panel.hpp"
#include "tvsar/rng.hpp"

namespace tvsar {

enum class RhoShape { Rho1, Rho2 };        // -/+ 0.6 sin^2(2 pi tau)
enum class ErrorLaw { Normal, Uniform, ChiSq };
enum class Beta4Shape { Sin2PiTau, SinPiTau };

struct DgpConfig {
  int m = 10;
  int t_len = 5;
  Contiguity scheme = Contiguity::Rook;
  RhoShape rho_shape = RhoShape::Rho1;
  ErrorLaw error_law = ErrorLaw::Normal;
  double c = 0.0;  // deviation from the null; 0 means the null holds
  Beta4Shape beta4_shape = Beta4Shape::Sin2PiTau;
  std::uint64_t seed = 0;
  double noise_scale = 1.0;  // 0 gives noise-free draws
  double rho_scale = 1.0;    // 0 switches the spatial lag off

  int n() const { return m * m; }
};

/// True coefficient curves on the time grid, for scoring.
struct DgpTruth {
  Eigen::VectorXd rho;          // T
  Eigen::VectorXd beta1;        // 4 tau
  Eigen::VectorXd beta2;        // (tau+1)^2
  Eigen::VectorXd beta3_curve;  // -5 + c e^tau
  Eigen::VectorXd beta4_curve;  // 5 + c shape(tau)
};

struct SimulatedPanel {
  PanelData data;
  SpatialWeights weights;  // row-standardized lattice
  ModelSpec spec;          // varying {intercept, x2}, constant {x3, x4}
  DgpTruth truth;
};

/// One draw of mean-zero unit-variance noise under the given law.
double draw_error(Rng& rng, ErrorLaw law);

/// One replicate of the simulation design: x1 = 1, x2..x4 ~ N(0,1),
/// alpha_i ~ U(0,1) (N-1 draws, first effect implied), errors per law, and
/// Y solved per period from (I - rho(tau_t) W_N) Y_t = B_t + alpha + eps_t.
/// Replicate j's draws depend only on (cfg.seed, j).
SimulatedPanel generate(const DgpConfig& cfg, int replicate);

struct McSummary {
  double amse_rho = 0.0;
  double amse_beta1 = 0.0;
  double amse_beta2 = 0.0;
  double bias_beta3 = 0.0;
  double sd_beta3 = 0.0;
  double bias_beta4 = 0.0;
  double sd_beta4 = 0.0;
  int n_sim = 0;
  DgpConfig config;

  Eigen::MatrixXd mean_curves;  // T x 3: averaged rho, beta1, beta2 estimates
  Eigen::MatrixXd true_curves;  // T x 3

  // Per-replicate estimates; curves are kept only when requested.
  Eigen::VectorXd beta3_hats;  // n_sim
  Eigen::VectorXd beta4_hats;  // n_sim
  Eigen::MatrixXd rho_hats;    // n_sim x T
  Eigen::MatrixXd beta1_hats;
  Eigen::MatrixXd beta2_hats;
};

/// Estimation accuracy over n_sim replicates: AMSE of the time-varying
/// coefficient estimates and bias/SD of the constant ones. A replicate
/// failure aborts the summary with the replicate index in the message.
McSummary mc_estimation(const DgpConfig& cfg, int n_sim, int workers,
                        bool keep_curves = false);

/// Rejection rates of the bootstrap test under the null (c must be 0), one
/// per significance level.
std::vector<double> mc_size(const DgpConfig& cfg, int n_sim, int k,
                            const std::vector<double>& alphas, int workers);

/// Rejection rate under an alternative (c must be positive).
double mc_power(const DgpConfig& cfg, int n_sim, int k, double alpha,
                int workers);

}  // namespace tvsar
