#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tvsar/errors.hpp"

namespace tvsar {

enum class Contiguity { Rook, Queen };

/// N x N spatial adjacency matrix W_N with zero diagonal, optionally
/// row-standardized so each row's neighbor weights sum to one.
struct SpatialWeights {
  Eigen::MatrixXd values;
  bool standardized = false;

  int n_locations() const { return static_cast<int>(values.rows()); }

  /// Validates the invariants: square, finite non-negative entries, zero
  /// diagonal, and unit row sums when standardized. Throws on violation.
  void validate() const;
};

/// Binary Rook (edge-sharing) or Queen (edge- or corner-sharing) contiguity
/// on an m x m lattice; N = m^2, cells numbered row-major.
SpatialWeights build_lattice_weights(int m, Contiguity scheme);

/// Divides each row by its sum. A row with no neighbors is an error since it
/// cannot be standardized.
SpatialWeights row_standardize(const SpatialWeights& w);

/// The NT x NT block-diagonal operator I_T (x) W_N, applied per time block
/// without materializing the Kronecker product.
class TimeBlockOperator {
 public:
  TimeBlockOperator(SpatialWeights w, int t_len);

  int n() const { return n_; }
  int t_len() const { return t_len_; }
  int size() const { return n_ * t_len_; }
  const SpatialWeights& weights() const { return w_; }

  /// (I_T (x) W_N) * v for an NT vector or NT x c matrix.
  Eigen::MatrixXd apply(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// Dense materialization, for small-case tests only.
  Eigen::MatrixXd dense() const;

 private:
  SpatialWeights w_;
  int n_;
  int t_len_;
};

inline TimeBlockOperator expand_over_time(const SpatialWeights& w, int t_len) {
  return TimeBlockOperator(w, t_len);
}

/// Y_w = W * Y, the neighbor-weighted response stacked location-fastest.
Eigen::VectorXd spatial_lag(const TimeBlockOperator& w_big,
                            const Eigen::Ref<const Eigen::VectorXd>& y);

/// Stacked panel: element (t*N + i) of y holds unit i at period t, and
/// tau[t] = (t+1)/T.
struct PanelData {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  int n = 0;
  int t_len = 0;
  Eigen::VectorXd tau;

  int size() const { return n * t_len; }
  int p() const { return static_cast<int>(x.cols()); }

  static PanelData make(Eigen::VectorXd y, Eigen::MatrixXd x, int n,
                        int t_len);
};

/// Partition of the X columns into the time-varying block X_v (q columns,
/// containing the intercept) and the constant block X_c (p - q columns).
struct ModelSpec {
  std::vector<int> varying_cols;
  std::vector<int> constant_cols;
  int intercept_col = 0;

  int q() const { return static_cast<int>(varying_cols.size()); }

  /// Checks that (varying_cols, constant_cols) partitions {0..p-1} and that
  /// the intercept column is in the varying block.
  void validate(int p) const;

  Eigen::MatrixXd varying_block(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  Eigen::MatrixXd constant_block(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
};

/// The dummy-variable design D = 1_T (x) E with E = (-1_{N-1}, I_{N-1})^T,
/// encoding fixed effects alpha_2..alpha_N under sum(alpha_i) = 0. Stored
/// implicitly; all products use the block structure.
class FixedEffectsDesign {
 public:
  FixedEffectsDesign(int n, int t_len);

  int n() const { return n_; }
  int t_len() const { return t_len_; }
  int rows() const { return n_ * t_len_; }
  int cols() const { return n_ - 1; }

  /// D^T * v : (N-1) x c from NT x c.
  Eigen::MatrixXd dt_apply(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// D * psi : NT x c from (N-1) x c.
  Eigen::MatrixXd d_apply(const Eigen::Ref<const Eigen::MatrixXd>& psi) const;

  /// (D^T D)^{-1} * u via the closed form (1/T)(I - J/N).
  Eigen::MatrixXd dtd_solve(const Eigen::Ref<const Eigen::MatrixXd>& u) const;

  /// P_D * v = D (D^T D)^{-1} D^T v.
  Eigen::MatrixXd pd_apply(const Eigen::Ref<const Eigen::MatrixXd>& v) const;

  /// Completes (alpha_2..alpha_N) to length N with alpha_1 = -sum(others).
  Eigen::VectorXd complete_effects(
      const Eigen::Ref<const Eigen::VectorXd>& psi) const;

  /// Dense NT x (N-1) materialization, for small-case tests only.
  Eigen::MatrixXd dense() const;

 private:
  int n_;
  int t_len_;
};

}  // namespace tvsar
