#include "curvekit/neighborhoods.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "curvekit/error.hpp"
#include "curvekit/random.hpp"

namespace curvekit {

std::string_view to_string(NeighborhoodMethod m) {
  switch (m) {
    case NeighborhoodMethod::Svd: return "svd";
    case NeighborhoodMethod::Knn: return "knn";
    case NeighborhoodMethod::Affine: return "affine";
    case NeighborhoodMethod::Given: return "given";
  }
  return "given";
}

Tensor2D batch_to_tensor(const NeighborhoodBatch& batch) {
  const std::size_t dim = batch.ambient_dim();
  if (batch.neighbors.rows() > 0 && batch.neighbors.cols() != dim) {
    throw Error(ErrorCode::ShapeMismatch, "neighbor width differs from base dimension");
  }
  Tensor2D out(batch.size() + 1, dim);
  std::copy(batch.base.data(), batch.base.data() + dim, out.data().begin());
  std::copy(batch.neighbors.data().begin(), batch.neighbors.data().end(), out.data().begin() + std::ptrdiff_t(dim));
  out.ext.block_size = std::uint32_t(batch.size() + 1);
  return out;
}

std::vector<NeighborhoodBatch> batches_from_tensor(const Tensor2D& t) {
  const std::size_t block = t.ext.block_size ? *t.ext.block_size : t.rows();
  if (block < 2 || t.rows() % block != 0) {
    throw Error(ErrorCode::MisalignedBundle, std::to_string(t.rows()) + " rows do not split into blocks of " +
                                                 std::to_string(block) + " (base + >= 1 neighbor)");
  }
  std::vector<NeighborhoodBatch> out;
  for (std::size_t first = 0; first < t.rows(); first += block) {
    NeighborhoodBatch b;
    auto base = t.row(first);
    b.base = Eigen::Map<const Eigen::VectorXd>(base.data(), Eigen::Index(base.size()));
    b.neighbors = t.slice_rows(first + 1, block - 1);
    out.push_back(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVD truncation

SvdTruncationPlan SvdTruncationPlan::exhaustive(int tail_size) {
  SvdTruncationPlan plan;
  plan.tail_size = tail_size;
  plan.validate();
  const std::uint64_t count = std::uint64_t{1} << tail_size;
  plan.masks.resize(count);
  std::iota(plan.masks.begin(), plan.masks.end(), std::uint64_t{0});
  return plan;
}

void SvdTruncationPlan::validate() const {
  if (tail_size < 0 || tail_size > 30) {
    throw Error(ErrorCode::InvalidArgument, "tail_size must be in [0, 30], got " + std::to_string(tail_size));
  }
  std::unordered_set<std::uint64_t> seen;
  for (auto m : masks) {
    if (m >> tail_size) throw Error(ErrorCode::InvalidArgument, "mask has bits beyond tail_size");
    if (!seen.insert(m).second) throw Error(ErrorCode::InvalidArgument, "duplicate mask " + std::to_string(m));
  }
}

NeighborhoodBatch svd_neighborhood(const ImageTensor& img, const SvdTruncationPlan& plan) {
  img.validate();
  plan.validate();
  if (plan.masks.empty()) throw Error(ErrorCode::EmptyMaskSet, "truncation plan has no masks");

  const auto m = Eigen::Index(img.height), n = Eigen::Index(img.width);
  const Eigen::Index s = std::min(m, n);
  const std::size_t plane = img.height * img.width;
  const std::size_t dim = plane * img.channels;

  // rank_one[ch][b] = sigma * u v^T for tail bit b, empty when the bit is a no-op.
  std::vector<std::vector<RowMatrix>> rank_one(img.channels, std::vector<RowMatrix>(std::size_t(plan.tail_size)));
  for (std::size_t ch = 0; ch < img.channels; ++ch) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(img.channel(ch), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    const double cutoff = sigma.size() ? sigma[0] * double(std::max(m, n)) * std::numeric_limits<double>::epsilon() : 0.0;
    for (int b = 0; b < plan.tail_size; ++b) {
      const Eigen::Index k = s - plan.tail_size + b;
      if (k < 0 || sigma[k] <= cutoff) continue;
      rank_one[ch][std::size_t(b)] = sigma[k] * svd.matrixU().col(k) * svd.matrixV().col(k).transpose();
    }
  }

  NeighborhoodBatch batch;
  batch.method = NeighborhoodMethod::Svd;
  batch.base = Eigen::Map<const Eigen::VectorXd>(img.data.data(), Eigen::Index(dim));

  std::vector<double> rows;
  rows.reserve(plan.masks.size() * dim);
  std::unordered_multimap<std::size_t, std::size_t> by_hash;
  std::vector<double> candidate(dim);

  for (std::uint64_t mask : plan.masks) {
    std::copy(img.data.begin(), img.data.end(), candidate.begin());
    for (std::size_t ch = 0; ch < img.channels; ++ch) {
      Eigen::Map<RowMatrix> out(candidate.data() + ch * plane, m, n);
      for (int b = 0; b < plan.tail_size; ++b) {
        const auto& term = rank_one[ch][std::size_t(b)];
        if ((mask >> b & 1U) && term.size() != 0) out -= term;
      }
    }
    const std::string_view bytes(reinterpret_cast<const char*>(candidate.data()), dim * sizeof(double));
    const std::size_t h = std::hash<std::string_view>{}(bytes);
    bool duplicate = false;
    for (auto [it, end] = by_hash.equal_range(h); it != end; ++it) {
      if (std::memcmp(rows.data() + it->second * dim, candidate.data(), dim * sizeof(double)) == 0) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    by_hash.emplace(h, batch.provenance.size());
    rows.insert(rows.end(), candidate.begin(), candidate.end());
    batch.provenance.push_back(mask);
  }
  batch.neighbors = Tensor2D(batch.provenance.size(), dim, std::move(rows));
  return batch;
}

// ---------------------------------------------------------------------------
// kNN

NeighborhoodBatch knn_neighborhood(const Tensor2D& data, std::size_t index, std::size_t k) {
  const std::size_t n = data.rows();
  if (index >= n) throw Error(ErrorCode::InvalidArgument, "base row " + std::to_string(index) + " out of range");
  if (k == 0 || k >= n) {
    throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " needs 1 <= k < N=" + std::to_string(n));
  }
  const auto points = data.matrix();
  const Eigen::RowVectorXd base = points.row(Eigen::Index(index));

  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == index) continue;
    order.emplace_back((points.row(Eigen::Index(i)) - base).squaredNorm(), i);
  }
  std::partial_sort(order.begin(), order.begin() + std::ptrdiff_t(k), order.end());

  NeighborhoodBatch batch;
  batch.method = NeighborhoodMethod::Knn;
  batch.base = base.transpose();
  batch.neighbors = Tensor2D(k, data.cols());
  for (std::size_t j = 0; j < k; ++j) {
    auto src = data.row(order[j].second);
    std::copy(src.begin(), src.end(), batch.neighbors.row(j).begin());
    batch.provenance.push_back(order[j].second);
  }
  return batch;
}

// ---------------------------------------------------------------------------
// Affine

ImageTensor apply_affine(const ImageTensor& img, const AffineParams& params) {
  img.validate();
  if (params.is_identity()) return img;

  constexpr double deg = std::numbers::pi / 180.0;
  const double th = params.rotation_deg * deg;
  Eigen::Matrix2d rot;
  rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  Eigen::Matrix2d shear_x = Eigen::Matrix2d::Identity();
  shear_x(0, 1) = std::tan(params.shear_x_deg * deg);
  Eigen::Matrix2d shear_y = Eigen::Matrix2d::Identity();
  shear_y(1, 0) = std::tan(params.shear_y_deg * deg);
  const Eigen::Matrix2d inverse = (rot * shear_x * shear_y).inverse();

  const Eigen::Vector2d center((double(img.width) - 1.0) / 2.0, (double(img.height) - 1.0) / 2.0);
  const Eigen::Vector2d shift(params.translate_x, params.translate_y);
  const auto w = std::ptrdiff_t(img.width), h = std::ptrdiff_t(img.height);

  ImageTensor out(img.height, img.width, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const Eigen::Vector2d src = inverse * (Eigen::Vector2d(double(x), double(y)) - center - shift) + center;
      const double fx = std::floor(src.x()), fy = std::floor(src.y());
      const auto x0 = std::ptrdiff_t(fx), y0 = std::ptrdiff_t(fy);
      const double ax = src.x() - fx, ay = src.y() - fy;
      const std::ptrdiff_t xs[2] = {x0, x0 + 1}, ys[2] = {y0, y0 + 1};
      const double wx[2] = {1.0 - ax, ax}, wy[2] = {1.0 - ay, ay};
      for (std::size_t ch = 0; ch < img.channels; ++ch) {
        double acc = 0.0;
        for (int j = 0; j < 2; ++j) {
          if (ys[j] < 0 || ys[j] >= h || wy[j] == 0.0) continue;
          for (int i = 0; i < 2; ++i) {
            if (xs[i] < 0 || xs[i] >= w || wx[i] == 0.0) continue;
            acc += wy[j] * wx[i] * img.at(ch, std::size_t(ys[j]), std::size_t(xs[i]));
          }
        }
        out.at(ch, y, x) = acc;
      }
    }
  }
  return out;
}

AffineParams sample_affine_params(std::size_t height, std::size_t width, std::uint64_t seed, std::uint64_t counter) {
  auto rng = SplitMix64::stream(seed, counter);
  auto sym = [&rng](double half) { return half * (2.0 * rng.uniform() - 1.0); };
  AffineParams p;
  p.rotation_deg = sym(10.0);
  p.shear_x_deg = sym(10.0);
  p.shear_y_deg = sym(10.0);
  p.translate_x = sym(0.1 * double(width));
  p.translate_y = sym(0.1 * double(height));
  return p;
}

NeighborhoodBatch affine_neighborhood(const ImageTensor& img, std::size_t n, std::uint64_t seed) {
  img.validate();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "affine neighborhood needs n >= 1");
  const std::size_t dim = img.data.size();
  NeighborhoodBatch batch;
  batch.method = NeighborhoodMethod::Affine;
  batch.base = Eigen::Map<const Eigen::VectorXd>(img.data.data(), Eigen::Index(dim));
  batch.neighbors = Tensor2D(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto warped = apply_affine(img, sample_affine_params(img.height, img.width, seed, i));
    std::copy(warped.data.begin(), warped.data.end(), batch.neighbors.row(i).begin());
  }
  return batch;
}

double mean_distance_to_center(const NeighborhoodBatch& batch) {
  if (batch.size() == 0) throw Error(ErrorCode::EmptyInput, "neighborhood is empty");
  const auto rows = batch.neighbors.matrix();
  double total = 0.0;
  for (Eigen::Index j = 0; j < rows.rows(); ++j) total += (rows.row(j).transpose() - batch.base).norm();
  return total / double(batch.size());
}

}  // namespace curvekit
