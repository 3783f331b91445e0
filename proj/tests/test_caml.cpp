#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "curvekit/caml.hpp"
#include "curvekit/error.hpp"
#include "curvekit/metrics.hpp"
#include "curvekit/random.hpp"
#include "curvekit/synthetic.hpp"
#include "oracles.hpp"

using namespace curvekit;

namespace {

/// Batch anchored at the origin whose neighbors are every row of `points`.
NeighborhoodBatch origin_batch(const Tensor2D& points) {
  NeighborhoodBatch b;
  b.base = Eigen::VectorXd::Zero(Eigen::Index(points.cols()));
  b.neighbors = points;
  return b;
}

NeighborhoodBatch patch_batch(std::vector<Eigen::MatrixXd> hessians, int d, std::size_t k, std::uint64_t seed,
                              double noise = 0.0) {
  QuadraticPatchSpec spec;
  spec.d = d;
  spec.ambient = d + int(hessians.size());
  spec.hessians = std::move(hessians);
  spec.antithetic = noise == 0.0;
  spec.noise_sigma = noise;
  return origin_batch(sample_quadratic_patch(spec, k, seed));
}

/// Applies y -> s * Q y + t to the base and every neighbor.
NeighborhoodBatch transform(const NeighborhoodBatch& b, const Eigen::MatrixXd& q, const Eigen::VectorXd& t, double s) {
  NeighborhoodBatch out = b;
  out.base = s * q * b.base + t;
  const Eigen::MatrixXd moved = ((s * b.neighbors.matrix() * q.transpose()).rowwise() + t.transpose());
  out.neighbors = Tensor2D::from_matrix(moved);
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected curvekit::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("design rows") {
  CHECK(design_columns(1) == 2);
  CHECK(design_columns(2) == 5);
  CHECK(design_columns(3) == 9);
  CHECK(design_row(Eigen::VectorXd::Constant(1, 2.0)) == Eigen::RowVector2d(2, 4));
  Eigen::RowVectorXd r2(5);
  r2 << 1, 3, 1, 9, 3;
  CHECK(design_row(Eigen::Vector2d(1, 3)) == r2);
  Eigen::RowVectorXd r3(9);
  r3 << 1, 2, 3, 1, 4, 9, 2, 3, 6;
  CHECK(design_row(Eigen::Vector3d(1, 2, 3)) == r3);
}

TEST_CASE("planar neighborhoods are flagged, not fitted with curvature") {
  Tensor2D plane(30, 3);
  SplitMix64 rng(1);
  for (std::size_t i = 0; i < 30; ++i) {
    plane(i, 0) = rng.uniform() - 0.5;
    plane(i, 1) = rng.uniform() - 0.5;
  }
  const auto batch = origin_batch(plane);
  const LocalFrame frame = build_frame(batch, 2);
  CHECK_FALSE(frame.rank_ok);
  CHECK(frame.rank == 2);
  CHECK(frame.normal_coords.cwiseAbs().maxCoeff() <= 1e-14);
  const auto result = estimate_point_curvature(batch, 2);
  CHECK_FALSE(result.rank_ok);
  CHECK(result.principal_curvatures.cwiseAbs().maxCoeff() <= 1e-12);

  CamlOptions strict;
  strict.require_rank = true;
  CHECK(code_of([&] { build_frame(batch, 2, strict); }) == ErrorCode::RankDeficient);
}

TEST_CASE("frame of a shallow patch aligns with the x-plane") {
  Eigen::MatrixXd h(2, 2);
  h << 1, 0.3, 0.3, -0.5;
  const auto frame = build_frame(patch_batch({h}, 2, 200, 3), 2);
  CHECK(frame.rank_ok);
  CHECK(std::abs(frame.normal_basis(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frame.tangent_basis.row(2).norm() <= 1e-12);
  // Orthonormal frame.
  Eigen::MatrixXd all(3, 3);
  all << frame.tangent_basis, frame.normal_basis;
  CHECK((all.transpose() * all - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
}

TEST_CASE("exact recovery of a noiseless quadratic") {
  Eigen::MatrixXd h = Eigen::Vector2d(4, -2).asDiagonal();
  const auto batch = patch_batch({h}, 2, 200, 7);
  const auto fit = fit_taylor(build_frame(batch, 2));
  CHECK_FALSE(fit.ill_conditioned);
  CHECK(fit.gradients[0].norm() <= 1e-8);
  CHECK(fit.residual_norms[0] <= 1e-10);
  const auto result = principal_curvatures(fit);
  CHECK(result.principal_curvatures(0, 0) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(result.principal_curvatures(0, 1) == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(gaussian_curvature_2d(result) == doctest::Approx(-8.0).epsilon(1e-8));
}

TEST_CASE("flat patch gives zero Hessians") {
  const auto batch = patch_batch({Eigen::MatrixXd::Zero(2, 2)}, 2, 100, 2);
  const auto result = estimate_point_curvature(batch, 2);
  CHECK(result.hessians[0].norm() <= 1e-12);
}

TEST_CASE("d = 3 principal curvatures match the closed-form eigenvalues") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto hs = random_symmetric_hessians(3, 1, 1.0, seed);
    const auto batch = patch_batch(hs, 3, 400, seed + 100);
    const auto result = estimate_point_curvature(batch, 3);
    // The normal points toward the side the neighbors lie on.
    const double side = batch.neighbors.matrix().col(3).sum() >= 0.0 ? 1.0 : -1.0;
    auto expected = oracle::symmetric_eigenvalues_closed_form(side * hs[0]);
    for (int a = 0; a < 3; ++a) {
      CHECK(result.principal_curvatures(0, a) == doctest::Approx(expected[std::size_t(a)]).epsilon(1e-7));
    }
  }
}

TEST_CASE("noise error shrinks as the neighborhood grows") {
  const Eigen::MatrixXd h = Eigen::Vector2d(2, 1).asDiagonal();
  auto mean_error = [&](std::size_t k) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto r = estimate_point_curvature(patch_batch({h}, 2, k, seed, 2e-4), 2);
      total += std::abs(r.principal_curvatures(0, 0) - 2.0) + std::abs(r.principal_curvatures(0, 1) - 1.0);
    }
    return total / 20.0;
  };
  const double small = mean_error(40), large = mean_error(2000);
  CHECK(large < small);
  CHECK(large < 0.2);
}

TEST_CASE("tilted plane has zero gradients and curvature") {
  SplitMix64 rng(4);
  const Eigen::MatrixXd q = oracle::random_rotation(3, rng);
  Tensor2D pts(40, 3);
  for (std::size_t i = 0; i < 40; ++i) {
    const Eigen::Vector3d y = q * Eigen::Vector3d(rng.uniform() - 0.5, rng.uniform() - 0.5, 0.0);
    for (std::size_t c = 0; c < 3; ++c) pts(i, c) = y[Eigen::Index(c)];
  }
  const auto fit = fit_taylor(build_frame(origin_batch(pts), 2));
  CHECK(fit.gradients[0].norm() <= 1e-12);
  CHECK(fit.hessians[0].norm() <= 1e-10);
}

TEST_CASE("curvatures are equivariant under rigid motions and scaling") {
  Eigen::MatrixXd h(2, 2);
  h << 3, 0.5, 0.5, 1;
  const auto batch = patch_batch({h}, 2, 150, 11);
  const auto ref = estimate_point_curvature(batch, 2);
  SplitMix64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd q = oracle::random_rotation(3, rng);
    const Eigen::Vector3d t(rng.uniform() * 10, rng.uniform() * 10, -rng.uniform() * 10);
    const auto moved = estimate_point_curvature(transform(batch, q, t, 1.0), 2);
    CHECK((moved.principal_curvatures - ref.principal_curvatures).cwiseAbs().maxCoeff() <= 1e-8);

    const double s = 0.25 + 4.0 * rng.uniform();
    const auto scaled = estimate_point_curvature(transform(batch, q, t, s), 2);
    for (int a = 0; a < 2; ++a) {
      CHECK(scaled.principal_curvatures(0, a) ==
            doctest::Approx(ref.principal_curvatures(0, a) / s).epsilon(1e-6));
    }
  }
}

TEST_CASE("unit sphere neighborhoods") {
  const Tensor2D sphere = sample_sphere(1.0, 10000, 5);
  const std::vector<std::size_t> bases = {0, 10, 200, 4000, 9999};
  const auto results = estimate_knn_curvatures(sphere, bases, 100, 2);
  for (const auto& r : results) {
    CHECK(r.codim() == 1);
    CHECK(r.principal_curvatures(0, 1) > 0.0);
    CHECK(gaussian_curvature_2d(r) == doctest::Approx(1.0).epsilon(0.1));
  }
}

TEST_CASE("fewer neighbors than ambient dimensions restricts the normal space") {
  Tensor2D pts(12, 40);
  SplitMix64 rng(6);
  for (double& v : pts.data()) v = rng.uniform();
  const auto frame = build_frame(origin_batch(pts), 2);
  CHECK(frame.codim() == 10);
  CHECK(estimate_point_curvature(origin_batch(pts), 2).count() == 20);
}

TEST_CASE("argument checks") {
  const auto batch = patch_batch({Eigen::MatrixXd::Identity(2, 2)}, 2, 4, 1);
  CHECK(code_of([&] { build_frame(batch, 3); }) == ErrorCode::DTooLarge);
  CHECK(code_of([&] { build_frame(batch, 0); }) == ErrorCode::DTooLarge);
  CHECK(code_of([&] { estimate_point_curvature(batch, 2); }) == ErrorCode::TooFewNeighbors);
  const auto tiny = patch_batch({Eigen::MatrixXd::Identity(2, 2)}, 2, 2, 1);
  CHECK(code_of([&] { build_frame(tiny, 2); }) == ErrorCode::TooFewNeighbors);
}
