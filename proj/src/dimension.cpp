#include "curvekit/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "curvekit/error.hpp"

namespace curvekit {

namespace {

Tensor2D unique_rows(const Tensor2D& data) {
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    auto ra = data.row(a), rb = data.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  auto same = [&](std::size_t a, std::size_t b) {
    auto ra = data.row(a), rb = data.row(b);
    return std::equal(ra.begin(), ra.end(), rb.begin());
  };
  std::stable_sort(order.begin(), order.end(), less);
  order.erase(std::unique(order.begin(), order.end(), same), order.end());
  // Restore original row order so index-based tie-breaking stays meaningful.
  std::sort(order.begin(), order.end());

  Tensor2D out(order.size(), data.cols());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto src = data.row(order[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> two_nearest_distances(const Tensor2D& data) {
  const std::size_t n = data.rows(), dim = data.cols();
  if (n < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 points, got " + std::to_string(n));
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> best(n, {inf, inf});
  const double* x = data.data().data();
  auto offer = [](std::pair<double, double>& slot, double d2) {
    if (d2 < slot.first) {
      slot.second = slot.first;
      slot.first = d2;
    } else if (d2 < slot.second) {
      slot.second = d2;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = x + i * dim;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* xj = x + j * dim;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = xi[k] - xj[k];
        d2 += diff * diff;
      }
      offer(best[i], d2);
      offer(best[j], d2);
    }
  }
  for (auto& [r1, r2] : best) {
    r1 = std::sqrt(r1);
    r2 = std::sqrt(r2);
  }
  return best;
}

IdEstimate twonn_id(const Tensor2D& data, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "discard_fraction must be in [0, 1)");
  }
  if (data.rows() < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 points, got " + std::to_string(data.rows()));
  const Tensor2D points = unique_rows(data);
  if (points.rows() == 1) throw Error(ErrorCode::AllPointsDuplicate, "all rows are identical");

  const auto dists = two_nearest_distances(points);
  std::vector<double> log_mu;
  log_mu.reserve(dists.size());
  for (auto [r1, r2] : dists) log_mu.push_back(std::log(r2 / r1));
  std::sort(log_mu.begin(), log_mu.end());

  const std::size_t n = log_mu.size();
  const auto discarded = std::size_t(std::floor(double(n) * discard_fraction));
  const std::size_t kept = n - discarded;
  if (kept == 0) throw Error(ErrorCode::TooFewPoints, "discard fraction leaves no ratios");

  double denom = std::accumulate(log_mu.begin(), log_mu.begin() + std::ptrdiff_t(kept), 0.0);
  denom += double(discarded) * log_mu[kept - 1];
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::DegenerateData, "all nearest-neighbor ratios equal 1; dimension is unbounded");
  }
  return IdEstimate{double(kept) / denom, kept, n, discard_fraction};
}

SpectrumSummary pc_id(const Tensor2D& data, double variance_threshold) {
  if (data.rows() < 2) throw Error(ErrorCode::TooFewPoints, "need at least 2 points");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "variance_threshold must be in (0, 1]");
  }
  const auto x = data.matrix();
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const double scale = 1.0 / double(data.rows() - 1);

  // Nonzero spectrum of the covariance; use the smaller Gram side.
  Eigen::VectorXd evals;
  if (centered.rows() < centered.cols()) {
    Eigen::MatrixXd gram = scale * centered * centered.transpose();
    evals = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly).eigenvalues();
  } else {
    Eigen::MatrixXd cov = scale * centered.transpose() * centered;
    evals = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov, Eigen::EigenvaluesOnly).eigenvalues();
  }

  SpectrumSummary out;
  out.eigenvalues.assign(evals.data(), evals.data() + evals.size());
  for (double& v : out.eigenvalues) v = std::max(v, 0.0);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());

  const double total = std::accumulate(out.eigenvalues.begin(), out.eigenvalues.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::DegenerateData, "all points are identical");

  double cumulative = 0.0;
  out.pc_id = out.eigenvalues.size();
  for (std::size_t k = 0; k < out.eigenvalues.size(); ++k) {
    cumulative += out.eigenvalues[k];
    if (cumulative / total >= variance_threshold - 1e-12) {
      out.pc_id = k + 1;
      break;
    }
  }

  const double hi = out.eigenvalues.front(), lo = out.eigenvalues.back();
  if (hi > lo) {
    for (std::size_t k = 0; k + 1 < out.eigenvalues.size(); ++k) {
      const double gap = (out.eigenvalues[k] - out.eigenvalues[k + 1]) / (hi - lo);
      out.mge = std::max(out.mge, gap);
    }
  }
  return out;
}

double relative_difference(double pc_id, double id) {
  if (!(id > 0.0)) throw Error(ErrorCode::InvalidArgument, "id must be positive");
  return std::abs(pc_id - id) / id;
}

int round_id_for_caml(double id) {
  if (!(id > 0.0)) throw Error(ErrorCode::InvalidArgument, "id must be positive");
  return std::max(1, int(std::floor(id + 0.5)));
}

}  // namespace curvekit
