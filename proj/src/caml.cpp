#include "curvekit/caml.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curvekit/error.hpp"

namespace curvekit {

int design_columns(int d) { return 2 * d + d * (d - 1) / 2; }

namespace {

void orient_by_largest_component(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index at = 0;
  v.cwiseAbs().maxCoeff(&at);
  if (v[at] < 0.0) v = -v;
}

}  // namespace

LocalFrame build_frame(const NeighborhoodBatch& batch, int d, const CamlOptions& options) {
  const auto ambient = Eigen::Index(batch.ambient_dim());
  const auto k = Eigen::Index(batch.size());
  if (d < 1 || d >= ambient) {
    throw Error(ErrorCode::DTooLarge, "intrinsic dimension d=" + std::to_string(d) + " must satisfy 1 <= d < D=" +
                                          std::to_string(ambient));
  }
  if (k < d + 1) {
    throw Error(ErrorCode::TooFewNeighbors, "frame needs K >= d+1 = " + std::to_string(d + 1) + " neighbors, got " +
                                                std::to_string(k));
  }
  if (Eigen::Index(batch.neighbors.cols()) != ambient) {
    throw Error(ErrorCode::ShapeMismatch, "neighbor width differs from base dimension");
  }

  const Eigen::MatrixXd centered = batch.neighbors.matrix().rowwise() - batch.base.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();

  LocalFrame frame;
  frame.d = d;
  frame.base = batch.base;
  frame.singular_values = sigma;
  const double tol = sigma.size() ? sigma[0] * options.rank_tolerance : 0.0;
  frame.rank = (sigma.array() > tol).count();
  frame.rank_ok = frame.rank >= d + 1;
  if (!frame.rank_ok && options.require_rank) {
    throw Error(ErrorCode::RankDeficient, "neighborhood rank " + std::to_string(frame.rank) + " < d+1 = " +
                                              std::to_string(d + 1));
  }

  frame.tangent_basis = v.leftCols(d);
  frame.normal_basis = v.rightCols(v.cols() - d);
  for (Eigen::Index j = 0; j < frame.tangent_basis.cols(); ++j) orient_by_largest_component(frame.tangent_basis.col(j));

  frame.tangent_coords = centered * frame.tangent_basis;
  frame.normal_coords = centered * frame.normal_basis;
  for (Eigen::Index a = 0; a < frame.normal_basis.cols(); ++a) {
    auto coords = frame.normal_coords.col(a);
    const double mean = coords.mean();
    const double rms = coords.norm() / std::sqrt(double(k));
    bool flip;
    if (rms > 0.0 && std::abs(mean) > 1e-8 * rms) {
      flip = mean < 0.0;
    } else {
      Eigen::Index at = 0;
      frame.normal_basis.col(a).cwiseAbs().maxCoeff(&at);
      flip = frame.normal_basis(at, a) < 0.0;
    }
    if (flip) {
      frame.normal_basis.col(a) *= -1.0;
      coords *= -1.0;
    }
  }
  return frame;
}

Eigen::RowVectorXd design_row(const Eigen::Ref<const Eigen::VectorXd>& u) {
  const auto d = u.size();
  Eigen::RowVectorXd row(design_columns(int(d)));
  Eigen::Index col = 0;
  for (Eigen::Index a = 0; a < d; ++a) row[col++] = u[a];
  for (Eigen::Index a = 0; a < d; ++a) row[col++] = u[a] * u[a];
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) row[col++] = u[a] * u[b];
  }
  return row;
}

Eigen::MatrixXd build_design_matrix(const LocalFrame& frame) {
  const auto k = frame.tangent_coords.rows();
  Eigen::MatrixXd psi(k, design_columns(frame.d));
  for (Eigen::Index j = 0; j < k; ++j) psi.row(j) = design_row(frame.tangent_coords.row(j).transpose());
  return psi;
}

TaylorFit fit_taylor(const LocalFrame& frame, const CamlOptions& options) {
  const int d = frame.d;
  const int columns = design_columns(d);
  const auto k = frame.tangent_coords.rows();
  if (k < columns) {
    throw Error(ErrorCode::TooFewNeighbors, "regression needs K >= " + std::to_string(columns) + " neighbors for d=" +
                                                std::to_string(d) + ", got " + std::to_string(k));
  }
  if (!frame.rank_ok && options.require_rank) {
    throw Error(ErrorCode::RankDeficient, "neighborhood rank " + std::to_string(frame.rank) + " < d+1");
  }

  const Eigen::MatrixXd psi = build_design_matrix(frame);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();

  TaylorFit fit;
  fit.d = d;
  fit.rank_ok = frame.rank_ok;
  const double smax = sigma.size() ? sigma[0] : 0.0;
  const double smin = sigma.size() ? sigma[sigma.size() - 1] : 0.0;
  fit.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  fit.ill_conditioned = !(fit.condition_number <= options.ill_condition);

  Eigen::VectorXd inv_sigma = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > options.pinv_cutoff * smax) inv_sigma[i] = 1.0 / sigma[i];
  }
  // One factorization of psi serves every normal direction.
  const Eigen::MatrixXd coeffs =
      svd.matrixV() * inv_sigma.asDiagonal() * (svd.matrixU().transpose() * frame.normal_coords);
  const Eigen::MatrixXd residuals = psi * coeffs - frame.normal_coords;

  const auto codim = frame.normal_coords.cols();
  fit.gradients.reserve(std::size_t(codim));
  fit.hessians.reserve(std::size_t(codim));
  for (Eigen::Index alpha = 0; alpha < codim; ++alpha) {
    const auto x = coeffs.col(alpha);
    fit.gradients.emplace_back(x.head(d));
    Eigen::MatrixXd h(d, d);
    for (int a = 0; a < d; ++a) h(a, a) = 2.0 * x[d + a];
    Eigen::Index col = 2 * d;
    for (int a = 0; a < d; ++a) {
      for (int b = a + 1; b < d; ++b) {
        h(a, b) = x[col];
        h(b, a) = x[col];
        ++col;
      }
    }
    fit.hessians.push_back(std::move(h));
    fit.residual_norms.push_back(residuals.col(alpha).norm());
  }
  return fit;
}

CurvatureResult principal_curvatures(const TaylorFit& fit) {
  CurvatureResult out;
  out.d = fit.d;
  out.rank_ok = fit.rank_ok;
  out.ill_conditioned = fit.ill_conditioned;
  out.hessians = fit.hessians;
  out.principal_curvatures.resize(Eigen::Index(fit.hessians.size()), fit.d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  for (std::size_t alpha = 0; alpha < fit.hessians.size(); ++alpha) {
    eig.compute(fit.hessians[alpha], Eigen::EigenvaluesOnly);
    // ascending from the solver
    out.principal_curvatures.row(Eigen::Index(alpha)) = eig.eigenvalues().reverse().transpose();
  }
  return out;
}

CurvatureResult estimate_point_curvature(const NeighborhoodBatch& batch, int d, const CamlOptions& options) {
  return principal_curvatures(fit_taylor(build_frame(batch, d, options), options));
}

std::vector<CurvatureResult> estimate_knn_curvatures(const Tensor2D& data, std::span<const std::size_t> bases,
                                                     std::size_t k, int d, const CamlOptions& options) {
  std::vector<CurvatureResult> out;
  out.reserve(bases.size());
  for (std::size_t index : bases) out.push_back(estimate_point_curvature(knn_neighborhood(data, index, k), d, options));
  return out;
}

}  // namespace curvekit
