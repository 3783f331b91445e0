#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curvekit/tensor.hpp"

namespace curvekit {

struct EllipsoidSpec {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  void validate() const;
};

/// Graph of f^alpha(x) = 1/2 x^T H^alpha x over [-extent, extent]^d, embedded
/// in R^D as rows [x, f^1(x), ..., f^(D-d)(x)].
struct QuadraticPatchSpec {
  int d = 2;
  int ambient = 3;
  std::vector<Eigen::MatrixXd> hessians;  // D-d symmetric d x d matrices
  double extent = 0.1;
  /// Standard deviation of isotropic Gaussian noise added to every coordinate.
  double noise_sigma = 0.0;
  /// Emit points in (x, -x) pairs. The cross moments sum(x_i f(x_i)) then vanish
  /// exactly, so an SVD frame anchored at the origin aligns with the x-space.
  bool antithetic = false;

  int codim() const { return ambient - d; }
  void validate() const;
};

/// Uniform points on the sphere of the given radius (normalized Gaussian draws).
Tensor2D sample_sphere(double radius, std::size_t n, std::uint64_t seed);

/// Unit-sphere samples scaled by (a, b, c). Not area-uniform on the ellipsoid.
Tensor2D sample_ellipsoid(const EllipsoidSpec& spec, std::size_t n, std::uint64_t seed);

/// (x/a)^2 + (y/b)^2 + (z/c)^2 - 1
double ellipsoid_residual(const EllipsoidSpec& spec, const std::array<double, 3>& p);

/// Closed-form Gaussian curvature of the ellipsoid at a surface point:
/// K = 1 / (a^2 b^2 c^2 (x^2/a^4 + y^2/b^4 + z^2/c^4)^2).
/// Throws OffSurface when |residual| > 1e-6.
double ellipsoid_gauss_curvature(const EllipsoidSpec& spec, const std::array<double, 3>& p);

Tensor2D sample_quadratic_patch(const QuadraticPatchSpec& spec, std::size_t n, std::uint64_t seed);

/// D-d random symmetric d x d matrices with N(0, scale^2) entries.
std::vector<Eigen::MatrixXd> random_symmetric_hessians(int d, int codim, double scale, std::uint64_t seed);

/// Deterministic image with natural-image-like statistics: a 1/f spectrum of
/// random oriented gratings plus a few smooth blobs, values in [0, 1].
ImageTensor synthetic_image(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed);

}  // namespace curvekit
