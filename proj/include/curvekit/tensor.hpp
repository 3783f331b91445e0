#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace curvekit {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ImageDims {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;

  bool operator==(const ImageDims&) const = default;
};

/// Optional sidecar fields carried in the LTNT extension block.
struct TensorExtensions {
  std::optional<ImageDims> image;
  /// Rows are grouped as (base, neighbor...) blocks of this many rows.
  std::optional<std::uint32_t> block_size;
  std::string metadata;

  bool empty() const { return !image && !block_size && metadata.empty(); }
  bool operator==(const TensorExtensions&) const = default;
};

/// N x D row-major matrix of sample coordinates.
class Tensor2D {
 public:
  Tensor2D() = default;
  Tensor2D(std::size_t rows, std::size_t cols);
  Tensor2D(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor2D from_matrix(const Eigen::Ref<const RowMatrix>& m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  const std::vector<double>& values() const { return data_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  Eigen::Map<const RowMatrix> matrix() const { return {data_.data(), Eigen::Index(rows_), Eigen::Index(cols_)}; }
  Eigen::Map<RowMatrix> matrix() { return {data_.data(), Eigen::Index(rows_), Eigen::Index(cols_)}; }

  /// Copy of the rows in [first, first + count).
  Tensor2D slice_rows(std::size_t first, std::size_t count) const;

  TensorExtensions ext;

  bool operator==(const Tensor2D&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// m x n x c image stored as c planes of m*n values, each plane row-major.
struct ImageTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  ImageTensor() = default;
  ImageTensor(std::size_t h, std::size_t w, std::size_t c);

  double& at(std::size_t ch, std::size_t y, std::size_t x) { return data[(ch * height + y) * width + x]; }
  double at(std::size_t ch, std::size_t y, std::size_t x) const { return data[(ch * height + y) * width + x]; }

  Eigen::Map<const RowMatrix> channel(std::size_t ch) const {
    return {data.data() + ch * height * width, Eigen::Index(height), Eigen::Index(width)};
  }
  Eigen::Map<RowMatrix> channel(std::size_t ch) {
    return {data.data() + ch * height * width, Eigen::Index(height), Eigen::Index(width)};
  }

  /// Throws InvalidImage unless every dimension is positive and data length matches.
  void validate() const;

  bool operator==(const ImageTensor&) const = default;
};

/// Pack an image as a (c, m*n) tensor with the dims in its extension block.
Tensor2D image_to_tensor(const ImageTensor& img);
/// Inverse of image_to_tensor; a tensor without image dims is rejected.
ImageTensor image_from_tensor(const Tensor2D& t);

struct LayerBundle {
  std::string layer_name;
  std::uint32_t layer_index = 0;
  std::uint32_t total_layers = 0;
  Tensor2D tensor;

  bool operator==(const LayerBundle&) const = default;
};

}  // namespace curvekit
