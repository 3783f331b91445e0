#include <doctest.h>

#include <cmath>
#include <random>

#include "curvekit/dimension.hpp"
#include "curvekit/error.hpp"
#include "curvekit/random.hpp"
#include "oracles.hpp"

using namespace curvekit;

namespace {

/// n points uniform on a d-dimensional unit cube, embedded in R^ambient by a
/// random rotation.
Tensor2D embedded_cube(std::size_t n, int d, int ambient, std::uint64_t seed) {
  SplitMix64 rng(seed);
  const Eigen::MatrixXd q = oracle::random_rotation(ambient, rng);
  Tensor2D out(n, std::size_t(ambient));
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(ambient);
    for (int k = 0; k < d; ++k) x[k] = rng.uniform();
    const Eigen::VectorXd y = q * x;
    for (int k = 0; k < ambient; ++k) out(i, std::size_t(k)) = y[k];
  }
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

TEST_CASE("two nearest distances by brute force") {
  const Tensor2D pts(4, 1, {0, 1, 3, 7});
  const auto d = two_nearest_distances(pts);
  CHECK(d[0] == std::pair(1.0, 3.0));
  CHECK(d[1] == std::pair(1.0, 2.0));
  CHECK(d[2] == std::pair(2.0, 3.0));
  CHECK(d[3] == std::pair(4.0, 6.0));
}

TEST_CASE("TwoNN on flat sets") {
  const auto plane = twonn_id(embedded_cube(2000, 2, 10, 1));
  CHECK(plane.id >= 1.8);
  CHECK(plane.id <= 2.2);
  CHECK(plane.n_points == 2000);
  CHECK(plane.n_used == 1800);

  const auto line = twonn_id(embedded_cube(2000, 1, 10, 2));
  CHECK(line.id >= 0.9);
  CHECK(line.id <= 1.1);
}

TEST_CASE("TwoNN collapses duplicates") {
  Tensor2D base = embedded_cube(500, 2, 4, 3);
  Tensor2D doubled(1000, 4);
  for (std::size_t i = 0; i < 500; ++i) {
    std::copy(base.row(i).begin(), base.row(i).end(), doubled.row(2 * i).begin());
    std::copy(base.row(i).begin(), base.row(i).end(), doubled.row(2 * i + 1).begin());
  }
  const auto a = twonn_id(base), b = twonn_id(doubled);
  CHECK(b.n_points == 500);
  CHECK(b.id == a.id);
  CHECK(std::isfinite(b.id));

  const Tensor2D same(5, 2, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  CHECK(code_of([&] { twonn_id(same); }) == ErrorCode::AllPointsDuplicate);
  CHECK(code_of([] { twonn_id(Tensor2D(2, 2, {0, 0, 1, 1})); }) == ErrorCode::TooFewPoints);
}

TEST_CASE("TwoNN is invariant to isometries and scaling") {
  const Tensor2D pts = embedded_cube(800, 3, 6, 4);
  SplitMix64 rng(8);
  const Eigen::MatrixXd q = oracle::random_rotation(6, rng);
  Eigen::VectorXd shift(6);
  shift << 1, -2, 3, 0.5, 0, 4;
  Tensor2D moved(800, 6), scaled(800, 6);
  for (std::size_t i = 0; i < 800; ++i) {
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(pts.row(i).data(), 6);
    const Eigen::VectorXd y = q * x + shift;
    for (std::size_t k = 0; k < 6; ++k) {
      moved(i, k) = y[Eigen::Index(k)];
      scaled(i, k) = 7.5 * x[Eigen::Index(k)];
    }
  }
  const double id = twonn_id(pts).id;
  CHECK(twonn_id(moved).id == doctest::Approx(id).epsilon(1e-9));
  CHECK(twonn_id(scaled).id == doctest::Approx(id).epsilon(1e-9));
}

TEST_CASE("PC-ID") {
  SUBCASE("three equal directions") {
    Tensor2D pts(6, 3, {1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1, 0, 0, 0, 1, 0, 0, -1});
    const auto s = pc_id(pts, 0.9);
    CHECK(s.pc_id == 3);
    REQUIRE(s.eigenvalues.size() == 3);
    CHECK(s.eigenvalues[0] == doctest::Approx(0.4));
    CHECK(s.eigenvalues[2] == doctest::Approx(0.4));
  }
  SUBCASE("isotropic Gaussian in R^10") {
    Tensor2D pts(5000, 10);
    SplitMix64 rng(1);
    std::normal_distribution<double> normal;
    for (double& v : pts.data()) v = normal(rng);
    const auto s = pc_id(pts, 0.9);
    CHECK(s.pc_id >= 9);
    CHECK(s.pc_id <= 10);
  }
  SUBCASE("a single direction has the largest possible gap") {
    Tensor2D pts(4, 2, {0, 0, 1, 0, 2, 0, 3, 0});
    const auto s = pc_id(pts, 0.9);
    CHECK(s.pc_id == 1);
    CHECK(s.mge == doctest::Approx(1.0));
  }
  SUBCASE("more dimensions than samples") {
    Tensor2D pts(3, 50);
    pts(1, 0) = 1.0;
    pts(2, 1) = 1.0;
    const auto s = pc_id(pts, 0.9);
    CHECK(s.eigenvalues.size() == 3);
    CHECK(s.pc_id == 2);
  }
  CHECK(code_of([] { pc_id(Tensor2D(3, 2, {1, 1, 1, 1, 1, 1})); }) == ErrorCode::DegenerateData);
}

TEST_CASE("relative difference and rounding") {
  CHECK(relative_difference(4, 2) == 1.0);
  CHECK(relative_difference(3, 3) == 0.0);
  CHECK(relative_difference(7, 4) == 0.75);
  CHECK_THROWS_AS(relative_difference(1, 0), Error);

  CHECK(round_id_for_caml(2.4) == 2);
  CHECK(round_id_for_caml(2.5) == 3);
  CHECK(round_id_for_caml(0.3) == 1);
  CHECK(round_id_for_caml(4.99) == 5);
}
