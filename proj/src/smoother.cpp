#include "tvsar/smoother.hpp"

#include <cmath>
#include <string>

namespace tvsar {

namespace {

constexpr double kRcondGate = 1e-12;

// K(tau0) v with per-period weights k (length T).
Eigen::MatrixXd project_period(const FixedEffectsDesign& d,
                               const Eigen::Ref<const Eigen::VectorXd>& k,
                               const Eigen::Ref<const Eigen::MatrixXd>& v) {
  const int n = d.n();
  const int t_len = d.t_len();
  const double s = k.sum();
  if (!(s > 0.0))
    throw SingularWeights("kernel weights sum to zero; projection undefined");

  // psi = (1/s)(I - J/N) sum_t k_t E^T v_t
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n - 1, v.cols());
  for (int t = 0; t < t_len; ++t) {
    const auto block = v.middleRows(t * n, n);
    u.noalias() += k(t) * block.bottomRows(n - 1);
    u.rowwise() -= k(t) * block.row(0);
  }
  u.rowwise() -= u.colwise().sum() / n;
  u /= s;

  // out_t = v_t - E psi for every period
  Eigen::MatrixXd out(v.rows(), v.cols());
  const Eigen::RowVectorXd top = -u.colwise().sum();
  for (int t = 0; t < t_len; ++t) {
    out.row(t * n) = v.row(t * n) - top;
    out.middleRows(t * n + 1, n - 1) = v.middleRows(t * n + 1, n - 1) - u;
  }
  return out;
}

// K(tau0)^T u = u - W_h D (D^T W_h D)^{-1} D^T u.
Eigen::MatrixXd project_period_transpose(
    const FixedEffectsDesign& d, const Eigen::Ref<const Eigen::VectorXd>& k,
    const Eigen::Ref<const Eigen::MatrixXd>& v) {
  const int n = d.n();
  const int t_len = d.t_len();
  const double s = k.sum();
  if (!(s > 0.0))
    throw SingularWeights("kernel weights sum to zero; projection undefined");

  Eigen::MatrixXd u = d.dt_apply(v);
  u.rowwise() -= u.colwise().sum() / n;
  u /= s;

  Eigen::MatrixXd out(v.rows(), v.cols());
  const Eigen::RowVectorXd top = -u.colwise().sum();
  for (int t = 0; t < t_len; ++t) {
    out.row(t * n) = v.row(t * n) - k(t) * top;
    out.middleRows(t * n + 1, n - 1) =
        v.middleRows(t * n + 1, n - 1) - k(t) * u;
  }
  return out;
}

// Scales the rows of v by their period's kernel weight.
Eigen::MatrixXd scale_by_period(const Eigen::Ref<const Eigen::VectorXd>& k,
                                int n,
                                const Eigen::Ref<const Eigen::MatrixXd>& v) {
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (Eigen::Index t = 0; t < k.size(); ++t)
    out.middleRows(t * n, n) = k(t) * v.middleRows(t * n, n);
  return out;
}

Eigen::VectorXd reduce_period_weights(const FixedEffectsDesign& d,
                                      const Eigen::Ref<const Eigen::VectorXd>& w_diag) {
  if (w_diag.size() != d.rows())
    throw DimensionError("weight vector must have N*T entries");
  Eigen::VectorXd k(d.t_len());
  for (int t = 0; t < d.t_len(); ++t) {
    const double kt = w_diag(t * d.n());
    if (!(kt >= 0.0) || !std::isfinite(kt))
      throw SingularWeights("kernel weights must be finite and non-negative");
    if ((w_diag.segment(t * d.n(), d.n()).array() != kt).any())
      throw DimensionError(
          "weight vector must be constant within each period block");
    k(t) = kt;
  }
  return k;
}

}  // namespace

Eigen::MatrixXd within_projection_apply(
    const FixedEffectsDesign& d, const Eigen::Ref<const Eigen::VectorXd>& w_diag,
    const Eigen::Ref<const Eigen::MatrixXd>& v) {
  if (v.rows() != d.rows())
    throw DimensionError("within_projection_apply expects N*T rows");
  return project_period(d, reduce_period_weights(d, w_diag), v);
}

Eigen::MatrixXd local_design(const Eigen::Ref<const Eigen::MatrixXd>& z,
                             const Eigen::Ref<const Eigen::VectorXd>& tau_grid,
                             double tau0, Bandwidth h) {
  const auto t_len = tau_grid.size();
  const auto n = z.rows() / t_len;
  if (z.rows() != n * t_len)
    throw DimensionError("regressor block rows must be a multiple of T");
  const auto r = z.cols();
  Eigen::MatrixXd m(z.rows(), 2 * r);
  m.leftCols(r) = z;
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const double c = (tau_grid(t) - tau0) / h.h;
    m.middleRows(t * n, n).rightCols(r) = c * z.middleRows(t * n, n);
  }
  return m;
}

namespace {

struct LocalSystem {
  Eigen::LDLT<Eigen::MatrixXd> ldlt;   // of A = M^T W_h* M
  Eigen::MatrixXd km;                  // K(tau0) M(tau0)
  Eigen::MatrixXd wkm;                 // diag(w) K M
  Eigen::VectorXd k;                   // per-period weights
};

LocalSystem assemble_local_system(
    const Eigen::Ref<const Eigen::MatrixXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, const FixedEffectsDesign& d, const KernelSpec& kernel) {
  LocalSystem sys;
  sys.k = period_kernel_weights(tau_grid, tau0, h, kernel);
  const Eigen::MatrixXd m = local_design(z, tau_grid, tau0, h);
  sys.km = project_period(d, sys.k, m);
  sys.wkm = scale_by_period(sys.k, d.n(), sys.km);
  const Eigen::MatrixXd a = sys.km.transpose() * sys.wkm;
  sys.ldlt.compute(a);
  if (!(sys.ldlt.info() == Eigen::Success) || sys.ldlt.rcond() < kRcondGate)
    throw SingularLocalSystem(
        tau0, "local system at tau0=" + std::to_string(tau0) +
                  " is singular or ill-conditioned (rcond < 1e-12)");
  return sys;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> local_linear_fit(
    const Eigen::Ref<const Eigen::MatrixXd>& z,
    const Eigen::Ref<const Eigen::VectorXd>& response,
    const Eigen::Ref<const Eigen::VectorXd>& tau_grid, double tau0,
    Bandwidth h, const FixedEffectsDesign& d, const KernelSpec& kernel) {
  const auto r = z.cols();
  const LocalSystem sys =
      assemble_local_system(z, tau_grid, tau0, h, d, kernel);
  const Eigen::MatrixXd ky = project_period(d, sys.k, response);
  const Eigen::VectorXd rhs = sys.wkm.transpose() * ky;
  const Eigen::VectorXd sol = sys.ldlt.solve(rhs);
  return {sol.head(r), sol.tail(r)};
}

Eigen::MatrixXd LocalSmoother::apply(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != size())
    throw DimensionError("smoother expects N*T rows");
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (int t = 0; t < t_len(); ++t) {
    const Eigen::MatrixXd coef = phi_[t] * v;  // r x c
    out.middleRows(t * n_, n_).noalias() = z_.middleRows(t * n_, n_) * coef;
  }
  return out;
}

Eigen::MatrixXd LocalSmoother::curves(
    const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != size())
    throw DimensionError("smoother expects an N*T response");
  Eigen::MatrixXd out(t_len(), r());
  for (int t = 0; t < t_len(); ++t) out.row(t) = (phi_[t] * v).transpose();
  return out;
}

Eigen::MatrixXd LocalSmoother::dense() const {
  Eigen::MatrixXd out(size(), size());
  for (int t = 0; t < t_len(); ++t)
    out.middleRows(t * n_, n_).noalias() = z_.middleRows(t * n_, n_) * phi_[t];
  return out;
}

LocalSmoother build_smoother(const Eigen::Ref<const Eigen::MatrixXd>& z,
                             const Eigen::Ref<const Eigen::VectorXd>& tau_grid,
                             Bandwidth h, const FixedEffectsDesign& d,
                             const KernelSpec& kernel) {
  if (z.rows() != d.rows())
    throw DimensionError("regressor block must have N*T rows");
  const auto r = z.cols();
  LocalSmoother s;
  s.z_ = z;
  s.n_ = d.n();
  s.h_ = h;
  s.phi_.reserve(static_cast<std::size_t>(d.t_len()));
  for (int t = 0; t < d.t_len(); ++t) {
    const LocalSystem sys =
        assemble_local_system(z, tau_grid, tau_grid(t), h, d, kernel);
    // B = M^T W_h* = (K M)^T W_h K; Phi = first r rows of A^{-1} B.
    const Eigen::MatrixXd bt = project_period_transpose(d, sys.k, sys.wkm);
    const Eigen::MatrixXd full = sys.ldlt.solve(bt.transpose());
    s.phi_.push_back(full.topRows(r));
  }
  return s;
}

}  // namespace tvsar
