#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "tvsar/estimator.hpp"

namespace tvsar {

struct TestConfig {
  int n_bootstrap = 500;
  std::uint64_t seed = 0;
  int parallel = 1;
};

struct TestResult {
  double w_observed = 0.0;
  Eigen::VectorXd w_bootstrap;  // k replicate statistics, by replicate index
  double p_value = 0.0;         // #{W*_j >= w_observed} / k
  int k = 0;
  std::uint64_t seed = 0;
};

/// W = (NT/2) (RSS_PL - RSS_TV) / RSS_TV; may be negative.
double w_statistic(double rss_pl, double rss_tv, int n, int t_len);

/// Residual bootstrap of the null distribution of W: resample centered
/// time-varying residuals, regenerate Y* from the fitted null model, re-run
/// the full two-model pipeline on each Y*, and count exceedances. Replicate j
/// draws from a stream derived from (seed, j), so the result is identical for
/// any worker count.
TestResult bootstrap_test(const PanelData& data, const ModelSpec& spec,
                          const SpatialWeights& w, const KernelSpec& kernel,
                          const FitResult& fit, const TvFitResult& tv,
                          const TestConfig& cfg);

enum class Decision { Reject, FailToReject };

/// Reject iff p_value < alpha (strict).
Decision decide(const TestResult& result, double alpha);

}  // namespace tvsar
