#pragma once

// Curvature-aware local regression.
//
// At a base point y with neighbors y_1..y_K the estimator
//   1. takes the SVD of the base-anchored neighbor matrix [y_j - y] and splits
//      its right singular vectors into a tangent basis (first d) and a normal
//      basis (the rest),
//   2. regresses every normal coordinate f^alpha on the tangent coordinates u
//      with the design row [u, u*u, u_a u_b (a<b)], and
//   3. reads the Hessians H^alpha off the quadratic coefficients; their
//      eigenvalues are the principal curvatures.
//
// The model is f^alpha(u) = grad . u + 1/2 u^T H u, so the coefficient on u_a^2
// is H_aa / 2 and the coefficient on u_a u_b is H_ab. There is no intercept: the
// base point is the frame origin.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvekit/neighborhoods.hpp"

namespace curvekit {

struct CamlOptions {
  /// Singular values of the design matrix below cutoff * sigma_max are dropped.
  double pinv_cutoff = 1e-10;
  /// Condition numbers above this set TaylorFit::ill_conditioned.
  double ill_condition = 1e8;
  /// Relative tolerance for the numerical rank of the neighborhood.
  double rank_tolerance = 1e-10;
  /// Throw RankDeficient instead of flagging rank_ok = false.
  bool require_rank = false;
};

struct LocalFrame {
  int d = 0;
  Eigen::VectorXd base;
  Eigen::MatrixXd tangent_basis;   // D x d
  Eigen::MatrixXd normal_basis;    // D x c; c = min(K, D) - d
  Eigen::MatrixXd tangent_coords;  // K x d
  Eigen::MatrixXd normal_coords;   // K x c
  Eigen::VectorXd singular_values;
  Eigen::Index rank = 0;
  bool rank_ok = false;

  int codim() const { return int(normal_basis.cols()); }
};

struct TaylorFit {
  int d = 0;
  std::vector<Eigen::VectorXd> gradients;
  std::vector<Eigen::MatrixXd> hessians;
  std::vector<double> residual_norms;
  double condition_number = 0.0;
  bool ill_conditioned = false;
  bool rank_ok = true;
};

struct CurvatureResult {
  int d = 0;
  /// Row alpha holds the eigenvalues of H^alpha, descending.
  Eigen::MatrixXd principal_curvatures;
  std::vector<Eigen::MatrixXd> hessians;
  bool rank_ok = true;
  bool ill_conditioned = false;

  int codim() const { return int(principal_curvatures.rows()); }
  std::size_t count() const { return std::size_t(principal_curvatures.size()); }
};

/// Number of regression unknowns for intrinsic dimension d: d + d + d(d-1)/2.
int design_columns(int d);

/// Orthonormal tangent/normal frame anchored at the base point. When K < D the
/// normal basis is restricted to the span of the neighborhood; directions
/// orthogonal to every neighbor carry identically zero normal coordinates.
///
/// Orientation: each tangent vector has its largest-magnitude component
/// positive; each normal vector points toward the side where the neighbors lie
/// on average.
LocalFrame build_frame(const NeighborhoodBatch& batch, int d, const CamlOptions& options = {});

/// K x design_columns(d). Row j: [u_1..u_d, u_1^2..u_d^2, u_a u_b for a < b].
Eigen::MatrixXd build_design_matrix(const LocalFrame& frame);
Eigen::RowVectorXd design_row(const Eigen::Ref<const Eigen::VectorXd>& u);

/// Least-squares fit of every normal coordinate with one pseudoinverse of the
/// design matrix.
TaylorFit fit_taylor(const LocalFrame& frame, const CamlOptions& options = {});

CurvatureResult principal_curvatures(const TaylorFit& fit);

CurvatureResult estimate_point_curvature(const NeighborhoodBatch& batch, int d, const CamlOptions& options = {});

/// kNN neighborhoods of the given rows of `data`, one result per base row.
std::vector<CurvatureResult> estimate_knn_curvatures(const Tensor2D& data, std::span<const std::size_t> bases,
                                                     std::size_t k, int d, const CamlOptions& options = {});

}  // namespace curvekit
