#include "tvsar/kernel.hpp"

#include <cmath>
#include <string>

namespace tvsar {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}

double kernel_eval(const KernelSpec& spec, double u) {
  switch (spec.family) {
    case KernelFamily::Gaussian:
      return std::exp(-0.5 * u * u) * kInvSqrt2Pi;
    case KernelFamily::Epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

Bandwidth rot_bandwidth(int n, int t_len) {
  if (t_len < 2)
    throw DegenerateGrid("ROT bandwidth needs T >= 2, got T=" +
                         std::to_string(t_len));
  Eigen::VectorXd tau(t_len);
  for (int t = 0; t < t_len; ++t)
    tau(t) = static_cast<double>(t + 1) / t_len;
  const double mean = tau.mean();
  const double var = (tau.array() - mean).square().sum() / (t_len - 1);
  const double s_tau = std::sqrt(var);
  const double h = s_tau * std::pow(static_cast<double>(n) * t_len, -0.2);
  return Bandwidth{h};
}

Eigen::VectorXd period_kernel_weights(
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, const KernelSpec& kernel) {
  if (!(h.h > 0.0) || !std::isfinite(h.h))
    throw DegenerateGrid("bandwidth must be positive and finite");
  Eigen::VectorXd k(tau_grid.size());
  for (Eigen::Index t = 0; t < tau_grid.size(); ++t)
    k(t) = kernel_eval(kernel, (tau_grid(t) - tau0) / h.h);
  return k;
}

Eigen::VectorXd kernel_weight_vector(
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, int n, const KernelSpec& kernel) {
  const Eigen::VectorXd k = period_kernel_weights(tau_grid, tau0, h, kernel);
  Eigen::VectorXd out(k.size() * n);
  for (Eigen::Index t = 0; t < k.size(); ++t)
    out.segment(t * n, n).setConstant(k(t));
  return out;
}

}  // namespace tvsar
