#include "curvekit/metrics.hpp"

#include <cmath>
#include <random>
#include <string>

#include "curvekit/error.hpp"
#include "curvekit/random.hpp"

namespace curvekit {

double MeanAccumulator::mean() const {
  if (count == 0) throw Error(ErrorCode::EmptyInput, "mean of zero values");
  return sum / double(count);
}

double mapc(std::span<const CurvatureResult> results) {
  if (results.empty()) throw Error(ErrorCode::EmptyInput, "no curvature results");
  MeanAccumulator acc;
  for (const auto& r : results) {
    acc.sum += r.principal_curvatures.cwiseAbs().sum();
    acc.count += r.count();
  }
  return acc.mean();
}

double mamc(std::span<const CurvatureResult> results) {
  if (results.empty()) throw Error(ErrorCode::EmptyInput, "no curvature results");
  MeanAccumulator acc;
  for (const auto& r : results) {
    for (Eigen::Index alpha = 0; alpha < r.principal_curvatures.rows(); ++alpha) {
      acc.add(std::abs(r.principal_curvatures.row(alpha).mean()));
    }
  }
  return acc.mean();
}

double gaussian_curvature_2d(const CurvatureResult& result) {
  if (result.d != 2 || result.codim() != 1) {
    throw Error(ErrorCode::WrongDimensions, "Gaussian curvature needs d=2 and D-d=1, got d=" +
                                                std::to_string(result.d) + ", D-d=" + std::to_string(result.codim()));
  }
  return result.principal_curvatures(0, 0) * result.principal_curvatures(0, 1);
}

RiemannTensor::RiemannTensor(int d) : d_(d), c_(std::size_t(d) * std::size_t(d) * std::size_t(d) * std::size_t(d)) {}

double RiemannTensor::contract(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                               const Eigen::VectorXd& z) const {
  double total = 0.0;
  for (int i = 0; i < d_; ++i) {
    for (int l = 0; l < d_; ++l) {
      const double ul = u[i] * v[l];
      if (ul == 0.0) continue;
      for (int j = 0; j < d_; ++j) {
        for (int k = 0; k < d_; ++k) total += (*this)(i, l, j, k) * ul * w[j] * z[k];
      }
    }
  }
  return total;
}

RiemannTensor riemann_tensor(std::span<const Eigen::MatrixXd> hessians, int max_d) {
  if (hessians.empty()) throw Error(ErrorCode::EmptyInput, "no Hessians");
  const int d = int(hessians.front().rows());
  if (d > max_d) {
    throw Error(ErrorCode::DimensionTooLarge, "Riemann tensor for d=" + std::to_string(d) + " exceeds cap " +
                                                  std::to_string(max_d));
  }
  RiemannTensor r(d);
  for (const auto& h : hessians) {
    if (h.rows() != d || h.cols() != d) throw Error(ErrorCode::ShapeMismatch, "Hessians differ in size");
    for (int i = 0; i < d; ++i) {
      for (int l = 0; l < d; ++l) {
        for (int j = 0; j < d; ++j) {
          for (int k = 0; k < d; ++k) r(i, l, j, k) += h(i, k) * h(l, j) - h(i, j) * h(l, k);
        }
      }
    }
  }
  return r;
}

RiemannTensor riemann_tensor(const TaylorFit& fit, int max_d) { return riemann_tensor(fit.hessians, max_d); }

double sectional_curvature(const RiemannTensor& r, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != r.dim() || v.size() != r.dim()) {
    throw Error(ErrorCode::ShapeMismatch, "plane vectors must have length d=" + std::to_string(r.dim()));
  }
  const double gram = u.squaredNorm() * v.squaredNorm() - u.dot(v) * u.dot(v);
  if (!(gram > 1e-12)) throw Error(ErrorCode::DegeneratePlane, "u and v are (nearly) linearly dependent");
  return r.contract(u, v, v, u) / gram;
}

double marc(const RiemannTensor& r) {
  if (r.dim() == 0) throw Error(ErrorCode::EmptyInput, "empty tensor");
  MeanAccumulator acc;
  for (double c : r.components()) acc.add(std::abs(c));
  return acc.mean();
}

double masc(const RiemannTensor& r, const PlaneSet& planes) {
  const int d = r.dim();
  if (d < 2) throw Error(ErrorCode::WrongDimensions, "sectional curvature needs d >= 2");
  MeanAccumulator acc;
  if (planes.random_count == 0) {
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        // Orthonormal coordinate pair: the quotient reduces to one component.
        acc.add(std::abs(r(i, j, j, i)));
      }
    }
    return acc.mean();
  }
  std::normal_distribution<double> normal;
  for (std::size_t p = 0; p < planes.random_count; ++p) {
    auto rng = SplitMix64::stream(planes.seed, p);
    Eigen::VectorXd u(d), v(d);
    double gram = 0.0;
    do {
      for (int i = 0; i < d; ++i) u[i] = normal(rng);
      for (int i = 0; i < d; ++i) v[i] = normal(rng);
      gram = u.squaredNorm() * v.squaredNorm() - u.dot(v) * u.dot(v);
    } while (!(gram > 1e-12));
    acc.add(std::abs(sectional_curvature(r, u, v)));
  }
  return acc.mean();
}

}  // namespace curvekit
