#include "curvekit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "curvekit/error.hpp"
#include "curvekit/random.hpp"

namespace curvekit {

void EllipsoidSpec::validate() const {
  if (!(a > 0.0 && b > 0.0 && c > 0.0) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw Error(ErrorCode::InvalidSpec, "ellipsoid semi-axes must be positive and finite");
  }
}

void QuadraticPatchSpec::validate() const {
  if (d < 1 || ambient <= d) {
    throw Error(ErrorCode::InvalidSpec, "patch needs D > d >= 1 (got d=" + std::to_string(d) +
                                            ", D=" + std::to_string(ambient) + ")");
  }
  if (int(hessians.size()) != codim()) {
    throw Error(ErrorCode::InvalidSpec, "patch needs " + std::to_string(codim()) + " Hessians, got " +
                                            std::to_string(hessians.size()));
  }
  for (std::size_t alpha = 0; alpha < hessians.size(); ++alpha) {
    const auto& h = hessians[alpha];
    if (h.rows() != d || h.cols() != d) {
      throw Error(ErrorCode::InvalidSpec, "Hessian " + std::to_string(alpha) + " is not d x d");
    }
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw Error(ErrorCode::InvalidSpec, "Hessian " + std::to_string(alpha) + " is not symmetric");
    }
  }
  if (!(extent > 0.0) || !(noise_sigma >= 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "extent must be positive and noise_sigma non-negative");
  }
}

namespace {

void unit_direction(SplitMix64& rng, double out[3]) {
  std::normal_distribution<double> normal;
  double norm = 0.0;
  do {
    for (int k = 0; k < 3; ++k) out[k] = normal(rng);
    norm = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
  } while (norm < 1e-12);
  for (int k = 0; k < 3; ++k) out[k] /= norm;
}

}  // namespace

Tensor2D sample_sphere(double radius, std::size_t n, std::uint64_t seed) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidRadius, "radius must be positive, got " + std::to_string(radius));
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  Tensor2D out(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = SplitMix64::stream(seed, i);
    double u[3];
    unit_direction(rng, u);
    for (int k = 0; k < 3; ++k) out(i, std::size_t(k)) = radius * u[k];
  }
  return out;
}

Tensor2D sample_ellipsoid(const EllipsoidSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  Tensor2D out = sample_sphere(1.0, n, seed);
  const double axes[3] = {spec.a, spec.b, spec.c};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 3; ++k) out(i, k) *= axes[k];
  }
  return out;
}

double ellipsoid_residual(const EllipsoidSpec& spec, const std::array<double, 3>& p) {
  const double x = p[0] / spec.a, y = p[1] / spec.b, z = p[2] / spec.c;
  return x * x + y * y + z * z - 1.0;
}

double ellipsoid_gauss_curvature(const EllipsoidSpec& spec, const std::array<double, 3>& p) {
  spec.validate();
  const double residual = ellipsoid_residual(spec, p);
  if (!(std::abs(residual) <= 1e-6)) {
    throw Error(ErrorCode::OffSurface, "point is off the ellipsoid (residual " + std::to_string(residual) + ")");
  }
  const double a2 = spec.a * spec.a, b2 = spec.b * spec.b, c2 = spec.c * spec.c;
  const double s = p[0] * p[0] / (a2 * a2) + p[1] * p[1] / (b2 * b2) + p[2] * p[2] / (c2 * c2);
  return 1.0 / (a2 * b2 * c2 * s * s);
}

Tensor2D sample_quadratic_patch(const QuadraticPatchSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const auto d = Eigen::Index(spec.d);
  const std::size_t ambient = std::size_t(spec.ambient);
  Tensor2D out(n, ambient);
  Eigen::VectorXd x(d);

  for (std::size_t i = 0; i < n; ++i) {
    // Antithetic runs draw x for each pair and mirror it; an unpaired final
    // row is the origin.
    const bool mirrored = spec.antithetic && (i % 2 == 1);
    const std::uint64_t counter = spec.antithetic ? i / 2 : i;
    if (spec.antithetic && i + 1 == n && n % 2 == 1) {
      x.setZero();
    } else {
      auto rng = SplitMix64::stream(seed, counter);
      for (Eigen::Index k = 0; k < d; ++k) x[k] = spec.extent * (2.0 * rng.uniform() - 1.0);
      if (mirrored) x = -x;
    }
    auto row = out.row(i);
    for (Eigen::Index k = 0; k < d; ++k) row[std::size_t(k)] = x[k];
    for (int alpha = 0; alpha < spec.codim(); ++alpha) {
      row[std::size_t(spec.d + alpha)] = 0.5 * x.dot(spec.hessians[std::size_t(alpha)] * x);
    }
  }

  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, spec.noise_sigma);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = SplitMix64::stream(seed ^ 0x5bd1e995ULL, i);
      for (double& v : out.row(i)) v += normal(rng);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> random_symmetric_hessians(int d, int codim, double scale, std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> out;
  std::normal_distribution<double> normal(0.0, scale);
  for (int alpha = 0; alpha < codim; ++alpha) {
    auto rng = SplitMix64::stream(seed, std::uint64_t(alpha));
    Eigen::MatrixXd h(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        h(i, j) = normal(rng);
        h(j, i) = h(i, j);
      }
    }
    out.push_back(std::move(h));
  }
  return out;
}

ImageTensor synthetic_image(std::size_t height, std::size_t width, std::size_t channels, std::uint64_t seed) {
  ImageTensor img(height, width, channels);
  img.validate();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr int kGratings = 48;
  constexpr int kBlobs = 5;

  for (std::size_t ch = 0; ch < channels; ++ch) {
    auto rng = SplitMix64::stream(seed, ch);
    std::normal_distribution<double> normal;
    auto plane = img.channel(ch);
    plane.setZero();
    for (int g = 0; g < kGratings; ++g) {
      const double freq = 0.5 + 12.0 * rng.uniform();  // cycles per image
      const double theta = two_pi * rng.uniform();
      const double phase = two_pi * rng.uniform();
      const double amp = normal(rng) / freq;
      const double fx = freq * std::cos(theta) / double(width);
      const double fy = freq * std::sin(theta) / double(height);
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          plane(Eigen::Index(y), Eigen::Index(x)) += amp * std::sin(two_pi * (fx * double(x) + fy * double(y)) + phase);
        }
      }
    }
    for (int b = 0; b < kBlobs; ++b) {
      const double cx = double(width) * rng.uniform();
      const double cy = double(height) * rng.uniform();
      const double sigma = 0.08 * double(std::max(height, width)) * (0.5 + rng.uniform());
      const double amp = 2.0 * normal(rng);
      for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
          const double r2 = (double(x) - cx) * (double(x) - cx) + (double(y) - cy) * (double(y) - cy);
          plane(Eigen::Index(y), Eigen::Index(x)) += amp * std::exp(-r2 / (2.0 * sigma * sigma));
        }
      }
    }
    const double lo = plane.minCoeff(), hi = plane.maxCoeff();
    if (hi > lo) plane = (plane.array() - lo) / (hi - lo);
  }
  return img;
}

}  // namespace curvekit
