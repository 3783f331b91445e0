#pragma once

#include <cstddef>
#include <vector>

#include "curvekit/tensor.hpp"

namespace curvekit {

struct IdEstimate {
  double id = 0.0;
  std::size_t n_used = 0;      // ratios entering the likelihood uncensored
  std::size_t n_points = 0;    // distinct points after de-duplication
  double discard_fraction = 0.0;
};

struct SpectrumSummary {
  std::vector<double> eigenvalues;  // covariance spectrum, descending
  std::size_t pc_id = 0;
  double mge = 0.0;
};

/// Exact first/second nearest-neighbor distances of every row (brute force).
/// Ties between equal distances are ordered by row index.
std::vector<std::pair<double, double>> two_nearest_distances(const Tensor2D& data);

/// TwoNN intrinsic dimension. mu = r2 / r1 per point; ratios above the
/// (1 - discard_fraction) quantile are treated as right-censored, giving the
/// maximum-likelihood estimate
///   id = n_used / (sum_{kept} log mu + n_discarded * log mu_cut).
/// Duplicate rows are collapsed first.
IdEstimate twonn_id(const Tensor2D& data, double discard_fraction = 0.1);

/// Linear dimension: smallest k whose leading covariance eigenvalues explain at
/// least `variance_threshold` of the variance, plus the maximum gap between
/// consecutive eigenvalues after min-max scaling to [0, 1].
SpectrumSummary pc_id(const Tensor2D& data, double variance_threshold = 0.9);

/// |pc_id - id| / id
double relative_difference(double pc_id, double id);

/// Nearest integer, ties up, never below 1.
int round_id_for_caml(double id);

}  // namespace curvekit
