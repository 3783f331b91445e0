#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "curvekit/caml.hpp"

namespace curvekit {

/// Count-weighted mean, mergeable across partial reductions.
struct MeanAccumulator {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    ++count;
  }
  void merge(const MeanAccumulator& other) {
    sum += other.sum;
    count += other.count;
  }
  double mean() const;
};

/// Mean |principal curvature| over every point, normal direction and eigenvalue.
double mapc(std::span<const CurvatureResult> results);
/// Mean over points and normal directions of |mean eigenvalue of H^alpha|.
double mamc(std::span<const CurvatureResult> results);

/// Product of the two principal curvatures of a surface in R^3.
double gaussian_curvature_2d(const CurvatureResult& result);

/// Covariant 4-tensor of the induced metric,
///   R(i, l, j, k) = sum_alpha h^a_ik h^a_lj - h^a_ij h^a_lk.
/// Antisymmetric in (i, l) and in (j, k), symmetric under pair exchange, and
/// satisfies the first Bianchi identity.
class RiemannTensor {
 public:
  RiemannTensor() = default;
  explicit RiemannTensor(int d);

  int dim() const { return d_; }
  double operator()(int i, int l, int j, int k) const { return c_[index(i, l, j, k)]; }
  double& operator()(int i, int l, int j, int k) { return c_[index(i, l, j, k)]; }
  std::span<const double> components() const { return c_; }

  /// R(u, v, w, z) contracted over all four slots.
  double contract(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                  const Eigen::VectorXd& z) const;

 private:
  std::size_t index(int i, int l, int j, int k) const {
    const auto d = std::size_t(d_);
    return ((std::size_t(i) * d + std::size_t(l)) * d + std::size_t(j)) * d + std::size_t(k);
  }
  int d_ = 0;
  std::vector<double> c_;
};

inline constexpr int kDefaultMaxRiemannDim = 16;

RiemannTensor riemann_tensor(std::span<const Eigen::MatrixXd> hessians, int max_d = kDefaultMaxRiemannDim);
RiemannTensor riemann_tensor(const TaylorFit& fit, int max_d = kDefaultMaxRiemannDim);

/// K(u, v) = R(u, v, v, u) / (<u,u><v,v> - <u,v>^2); +1/r^2 on a sphere of radius r.
double sectional_curvature(const RiemannTensor& r, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Mean |R_iljk| over all d^4 components.
double marc(const RiemannTensor& r);

/// Planes for MASC: coordinate planes (e_i, e_j), i < j, or `random_count`
/// planes spanned by Gaussian vector pairs.
struct PlaneSet {
  std::size_t random_count = 0;
  std::uint64_t seed = 0;

  static PlaneSet coordinate() { return {}; }
  static PlaneSet random(std::size_t n, std::uint64_t seed) { return {n, seed}; }
};

/// Mean |sectional curvature| over the plane set.
double masc(const RiemannTensor& r, const PlaneSet& planes = PlaneSet::coordinate());

}  // namespace curvekit
