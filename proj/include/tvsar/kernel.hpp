#pragma once

#include <Eigen/Dense>

#include "tvsar/errors.hpp"

namespace tvsar {

enum class KernelFamily { Gaussian, Epanechnikov };

struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
};

/// K(u): Gaussian exp(-u^2/2)/sqrt(2*pi), Epanechnikov 0.75(1-u^2) on |u|<=1.
double kernel_eval(const KernelSpec& spec, double u);

struct Bandwidth {
  double h = 0.0;
};

/// Rule-of-thumb bandwidth h = s_tau * (N*T)^(-1/5), where s_tau is the
/// sample standard deviation (denominator T-1) of the grid (1/T, ..., 1).
Bandwidth rot_bandwidth(int n, int t_len);

/// One kernel weight per period: k_t = K((tau_t - tau0)/h).
Eigen::VectorXd period_kernel_weights(
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, const KernelSpec& kernel);

/// The NT diagonal of W_h(tau0) = diag(K((tau_t - tau0)/h)) (x) I_N. The 1/h
/// normalizing factor is omitted; it cancels in every normal equation.
Eigen::VectorXd kernel_weight_vector(
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, int n, const KernelSpec& kernel);

}  // namespace tvsar
