#include "tvsar/panel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tvsar {

void SpatialWeights::validate() const {
  const auto n = values.rows();
  if (n == 0 || values.cols() != n)
    throw DimensionError("spatial weights must be a non-empty square matrix");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values(i, i) != 0.0)
      throw DiagonalNotZero("weights diagonal entry (" + std::to_string(i) +
                            "," + std::to_string(i) + ") is nonzero");
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw ParseError("weights entry (" + std::to_string(i) + "," +
                         std::to_string(j) + ") is negative or non-finite");
    }
  }
  if (standardized) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = values.row(i).sum();
      if (s > 0.0 && std::abs(s - 1.0) > 1e-12)
        throw ParseError("standardized weights row " + std::to_string(i) +
                         " sums to " + std::to_string(s));
    }
  }
}

SpatialWeights build_lattice_weights(int m, Contiguity scheme) {
  if (m < 2) throw InvalidGrid("lattice side must be at least 2, got " +
                               std::to_string(m));
  const int n = m * m;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  const int n_off = scheme == Contiguity::Queen ? 8 : 4;
  static constexpr int drow[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int dcol[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const int idx = r * m + c;
      for (int k = 0; k < n_off; ++k) {
        const int rr = r + drow[k];
        const int cc = c + dcol[k];
        if (rr < 0 || rr >= m || cc < 0 || cc >= m) continue;
        w(idx, rr * m + cc) = 1.0;
      }
    }
  }
  SpatialWeights out{std::move(w), false};
  out.validate();
  return out;
}

SpatialWeights row_standardize(const SpatialWeights& w) {
  w.validate();
  const auto n = w.values.rows();
  Eigen::MatrixXd out = w.values;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = out.row(i).sum();
    if (s <= 0.0)
      throw IsolatedLocation(static_cast<int>(i),
                             "location " + std::to_string(i) +
                                 " has no neighbors; cannot row-standardize");
    out.row(i) /= s;
  }
  return SpatialWeights{std::move(out), true};
}

TimeBlockOperator::TimeBlockOperator(SpatialWeights w, int t_len)
    : w_(std::move(w)), n_(w_.n_locations()), t_len_(t_len) {
  if (t_len_ < 1) throw DimensionError("t_len must be >= 1");
  w_.validate();
}

Eigen::MatrixXd TimeBlockOperator::apply(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != size())
    throw DimensionError("operator expects " + std::to_string(size()) +
                         " rows, got " + std::to_string(v.rows()));
  Eigen::MatrixXd out(v.rows(), v.cols());
  for (int t = 0; t < t_len_; ++t)
    out.middleRows(t * n_, n_).noalias() = w_.values * v.middleRows(t * n_, n_);
  return out;
}

Eigen::MatrixXd TimeBlockOperator::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size(), size());
  for (int t = 0; t < t_len_; ++t)
    out.block(t * n_, t * n_, n_, n_) = w_.values;
  return out;
}

Eigen::VectorXd spatial_lag(const TimeBlockOperator& w_big,
                            const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (y.size() != w_big.size())
    throw DimensionError("spatial_lag: y has length " +
                         std::to_string(y.size()) + ", operator expects " +
                         std::to_string(w_big.size()));
  return w_big.apply(y);
}

PanelData PanelData::make(Eigen::VectorXd y, Eigen::MatrixXd x, int n,
                          int t_len) {
  if (n < 2 || t_len < 1)
    throw DimensionError("panel needs N >= 2 locations and T >= 1 periods");
  const auto nt = static_cast<Eigen::Index>(n) * t_len;
  if (y.size() != nt || x.rows() != nt)
    throw DimensionError("panel arrays must have N*T rows");
  if (x.cols() < 2)
    throw InsufficientRegressors(
        "at least two regressors (intercept plus one covariate) are required");
  if (!y.allFinite() || !x.allFinite())
    throw ParseError("panel contains non-finite values");
  PanelData d;
  d.y = std::move(y);
  d.x = std::move(x);
  d.n = n;
  d.t_len = t_len;
  d.tau.resize(t_len);
  for (int t = 0; t < t_len; ++t) d.tau(t) = static_cast<double>(t + 1) / t_len;
  return d;
}

void ModelSpec::validate(int p) const {
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  auto mark = [&](int c) {
    if (c < 0 || c >= p)
      throw DimensionError("model column index " + std::to_string(c) +
                           " out of range for p=" + std::to_string(p));
    if (seen[static_cast<std::size_t>(c)])
      throw DimensionError("model column " + std::to_string(c) +
                           " assigned twice");
    seen[static_cast<std::size_t>(c)] = true;
  };
  for (int c : varying_cols) mark(c);
  for (int c : constant_cols) mark(c);
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw DimensionError("varying and constant columns must partition X");
  if (varying_cols.empty())
    throw DimensionError("at least one time-varying column is required");
  if (std::find(varying_cols.begin(), varying_cols.end(), intercept_col) ==
      varying_cols.end())
    throw DimensionError("intercept column must be in the varying block");
}

Eigen::MatrixXd ModelSpec::varying_block(
    const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  Eigen::MatrixXd out(x.rows(), varying_cols.size());
  for (std::size_t j = 0; j < varying_cols.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = x.col(varying_cols[j]);
  return out;
}

Eigen::MatrixXd ModelSpec::constant_block(
    const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  Eigen::MatrixXd out(x.rows(), constant_cols.size());
  for (std::size_t j = 0; j < constant_cols.size(); ++j)
    out.col(static_cast<Eigen::Index>(j)) = x.col(constant_cols[j]);
  return out;
}

FixedEffectsDesign::FixedEffectsDesign(int n, int t_len)
    : n_(n), t_len_(t_len) {
  if (n < 2 || t_len < 1)
    throw DimensionError("fixed-effects design needs N >= 2, T >= 1");
}

Eigen::MatrixXd FixedEffectsDesign::dt_apply(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  if (v.rows() != rows())
    throw DimensionError("dt_apply expects N*T rows");
  // E^T v_t = (v_t[1..N-1]) - v_t[0] per period block, summed over t.
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_ - 1, v.cols());
  for (int t = 0; t < t_len_; ++t) {
    const auto block = v.middleRows(t * n_, n_);
    out += block.bottomRows(n_ - 1);
    out.rowwise() -= block.row(0);
  }
  return out;
}

Eigen::MatrixXd FixedEffectsDesign::d_apply(
    const Eigen::Ref<const Eigen::MatrixXd>& psi) const {
  if (psi.rows() != cols())
    throw DimensionError("d_apply expects N-1 rows");
  Eigen::MatrixXd out(rows(), psi.cols());
  const Eigen::RowVectorXd top = -psi.colwise().sum();
  for (int t = 0; t < t_len_; ++t) {
    out.row(t * n_) = top;
    out.middleRows(t * n_ + 1, n_ - 1) = psi;
  }
  return out;
}

Eigen::MatrixXd FixedEffectsDesign::dtd_solve(
    const Eigen::Ref<const Eigen::MatrixXd>& u) const {
  if (u.rows() != cols())
    throw DimensionError("dtd_solve expects N-1 rows");
  // (D^T D)^{-1} = (1/T) (I - J/N)
  Eigen::MatrixXd out = u;
  out.rowwise() -= u.colwise().sum() / n_;
  out /= static_cast<double>(t_len_);
  return out;
}

Eigen::MatrixXd FixedEffectsDesign::pd_apply(
    const Eigen::Ref<const Eigen::MatrixXd>& v) const {
  return d_apply(dtd_solve(dt_apply(v)));
}

Eigen::VectorXd FixedEffectsDesign::complete_effects(
    const Eigen::Ref<const Eigen::VectorXd>& psi) const {
  if (psi.size() != cols())
    throw DimensionError("complete_effects expects N-1 entries");
  Eigen::VectorXd out(n_);
  out(0) = -psi.sum();
  out.tail(n_ - 1) = psi;
  return out;
}

Eigen::MatrixXd FixedEffectsDesign::dense() const {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n_, n_ - 1);
  e.row(0).setConstant(-1.0);
  e.bottomRows(n_ - 1) = Eigen::MatrixXd::Identity(n_ - 1, n_ - 1);
  Eigen::MatrixXd out(rows(), cols());
  for (int t = 0; t < t_len_; ++t) out.middleRows(t * n_, n_) = e;
  return out;
}

}  // namespace tvsar
