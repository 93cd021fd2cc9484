#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "tvsar/kernel.hpp"
#include "tvsar/panel.hpp"

namespace tvsar {

/// Applies the weighted within-projection K(tau0) = I - D(D^T W_h D)^{-1} D^T W_h
/// to v without materializing any NT x NT matrix. w_diag is the NT diagonal of
/// W_h(tau0), constant within each period block; with that structure
/// D^T W_h D = (sum_t k_t) E^T E and (E^T E)^{-1} = I - J/N.
Eigen::MatrixXd within_projection_apply(
    const FixedEffectsDesign& d, const Eigen::Ref<const Eigen::VectorXd>& w_diag,
    const Eigen::Ref<const Eigen::MatrixXd>& v);

/// Local design M(tau0) = [Z, ((tau - tau0)/h) . Z], the scalar factor applied
/// row-wise by the row's period.
Eigen::MatrixXd local_design(const Eigen::Ref<const Eigen::MatrixXd>& z,
                             const Eigen::Ref<const Eigen::VectorXd>& tau_grid,
                             double tau0, Bandwidth h);

/// Solves the concentrated local-linear system at tau0:
/// (a, b) = [M^T W_h* M]^{-1} M^T W_h* response, with W_h* = K^T W_h K applied
/// implicitly. a estimates the coefficient level, b estimates h times its
/// first derivative. Throws SingularLocalSystem when the reciprocal condition
/// estimate falls below 1e-12.
std::pair<Eigen::VectorXd, Eigen::VectorXd> local_linear_fit(
    const Eigen::Ref<const Eigen::MatrixXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& response,
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, const FixedEffectsDesign& d, const KernelSpec& kernel);

/// The assembled smoother S(h) over a regressor block Z, stored as the T
/// coefficient blocks Phi(tau_t) = (I_r, 0)[M^T W_h* M]^{-1} M^T W_h*. Row
/// (t*N + i) of S(h) is z_it^T Phi(tau_t); products never materialize the
/// NT x NT matrix.
class LocalSmoother {
 public:
  int r() const { return static_cast<int>(z_.cols()); }
  int n() const { return n_; }
  int t_len() const { return static_cast<int>(phi_.size()); }
  int size() const { return static_cast<int>(z_.rows()); }
  Bandwidth bandwidth() const { return h_; }

  /// S(h) * v for an NT vector or NT x c matrix.
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// Coefficient curves: row t holds Phi(tau_t) * v, a T x r matrix.
  Eigen::MatrixXd curves(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  /// Phi(tau_t) as an r x NT matrix.
  const Eigen::MatrixXd& phi(int t) const { return phi_.at(t); }

  /// Dense S(h), for small-case tests only.
  Eigen::MatrixXd dense() const;

  friend LocalSmoother build_smoother(
      const Eigen::Ref<const Eigen::MatrixXd>& z,
      const Eigen::Ref<const Eigen::VectorXd>& tau_grid, Bandwidth h,
      const FixedEffectsDesign& d, const KernelSpec& kernel);

 private:
  Eigen::MatrixXd z_;
  int n_ = 0;
  Bandwidth h_;
  std::vector<Eigen::MatrixXd> phi_;
};

/// Builds S(h) over Z: one local solve per grid point, the N rows of a period
/// sharing its solve.
LocalSmoother build_smoother(const Eigen::Ref<const Eigen::MatrixXd>& z,
                             const Eigen::Ref<const Eigen::VectorXd>& tau_grid,
                             Bandwidth h, const FixedEffectsDesign& d,
                             const KernelSpec& kernel);

}  // namespace tvsar
