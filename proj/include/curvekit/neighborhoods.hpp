#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "curvekit/tensor.hpp"

namespace curvekit {

enum class NeighborhoodMethod { Svd, Knn, Affine, Given };

std::string_view to_string(NeighborhoodMethod m);

/// A base point and K neighbor points in R^D.
struct NeighborhoodBatch {
  Eigen::VectorXd base;
  Tensor2D neighbors;  // K x D
  NeighborhoodMethod method = NeighborhoodMethod::Given;
  /// Svd: the truncation mask behind each neighbor row. Knn: the source row index.
  std::vector<std::uint64_t> provenance;

  std::size_t size() const { return neighbors.rows(); }
  std::size_t ambient_dim() const { return std::size_t(base.size()); }
};

/// Rows [base, neighbors...] tagged with block size K + 1.
Tensor2D batch_to_tensor(const NeighborhoodBatch& batch);
/// Splits a tensor into blocks of `block_size` rows (its extension field, or all
/// rows when absent); the first row of each block is the base.
std::vector<NeighborhoodBatch> batches_from_tensor(const Tensor2D& t);

/// Bit b of a mask zeroes singular value index s - tail_size + b, where s = min(m, n)
/// and indices count from the largest singular value. Bits that land below index 0
/// are no-ops.
struct SvdTruncationPlan {
  int tail_size = 10;
  std::vector<std::uint64_t> masks;

  /// All 2^tail_size masks, the empty mask first.
  static SvdTruncationPlan exhaustive(int tail_size = 10);
  void validate() const;
};

/// One neighbor per mask; each channel is rebuilt from its SVD with the masked
/// tail singular values removed. Outputs that are byte-identical (masks touching
/// only zero singular values) are kept once. The base is the flattened image.
NeighborhoodBatch svd_neighborhood(const ImageTensor& img, const SvdTruncationPlan& plan);

/// The k rows nearest to row `index` (Euclidean), excluding the row itself.
/// Ties go to the lower row index.
NeighborhoodBatch knn_neighborhood(const Tensor2D& data, std::size_t index, std::size_t k);

struct AffineParams {
  double rotation_deg = 0.0;
  double shear_x_deg = 0.0;
  double shear_y_deg = 0.0;
  double translate_x = 0.0;  // pixels
  double translate_y = 0.0;  // pixels

  bool is_identity() const {
    return rotation_deg == 0.0 && shear_x_deg == 0.0 && shear_y_deg == 0.0 && translate_x == 0.0 &&
           translate_y == 0.0;
  }
};

/// Rotation and shears about the image center, then translation. Bilinear
/// resampling, zero outside the source image.
ImageTensor apply_affine(const ImageTensor& img, const AffineParams& params);

/// Rotation and shears uniform in [-10, 10] degrees, translation uniform in
/// [-0.1 w, 0.1 w] x [-0.1 h, 0.1 h].
AffineParams sample_affine_params(std::size_t height, std::size_t width, std::uint64_t seed, std::uint64_t counter);

NeighborhoodBatch affine_neighborhood(const ImageTensor& img, std::size_t n, std::uint64_t seed);

/// Mean over neighbors of ||neighbor - base||_2.
double mean_distance_to_center(const NeighborhoodBatch& batch);

}  // namespace curvekit
