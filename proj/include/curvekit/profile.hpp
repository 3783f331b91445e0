#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curvekit/caml.hpp"
#include "curvekit/tensor.hpp"

namespace curvekit {

struct Histogram {
  std::vector<double> edges;         // bins + 1, ascending
  std::vector<std::size_t> counts;   // bins

  std::size_t total() const;
};

/// Histogram of every principal curvature on bins that are log-spaced in |k|
/// and mirror-symmetric about zero. Magnitudes span [max|k| * 10^-decades, max|k|].
/// With an odd bin count the central bin [-lo, lo] holds the near-zero values;
/// with an even count zero sits on an edge and lands in the bin above it.
Histogram curvature_histogram(std::span<const CurvatureResult> results, std::size_t bins, double decades = 6.0);

struct LayerRecord {
  std::string name;
  std::uint32_t layer_index = 0;
  double relative_depth = 0.0;
  double mapc = 0.0;
  double mapc_std = 0.0;  // over base points
  double id = 0.0;
  int d_used = 0;
  std::size_t pc_id = 0;
  double rd = 0.0;
  double mge = 0.0;
  std::size_t points = 0;
  std::size_t rank_deficient = 0;
  Histogram histogram;
};

struct LayerProfile {
  std::vector<LayerRecord> layers;  // ascending relative depth
  std::string note;
};

struct ProfileConfig {
  /// Base points per layer (all blocks when the bundle has fewer).
  std::size_t points = 100;
  /// kNN neighborhood size for bundles without block structure.
  std::size_t k = 200;
  /// Fixed intrinsic dimension; otherwise rounded TwoNN per layer.
  std::optional<int> fixed_d;
  double discard_fraction = 0.1;
  double variance_threshold = 0.9;
  std::size_t bins = 41;
  std::size_t threads = 1;
  CamlOptions caml;
};

/// layer_index / (total_layers - 1)
double relative_depth(std::uint32_t layer_index, std::uint32_t total_layers);

/// Runs dimension and curvature estimation on every layer. Layers with a
/// block-size extension are read as (base, neighbors...) blocks, and the
/// dimension estimates use the base rows only; other layers use kNN
/// neighborhoods of evenly spaced rows.
LayerProfile build_profile(std::span<const LayerBundle> bundle, const ProfileConfig& config = {});

struct GapReport {
  double mapc_gap = 0.0;
  double mean_mapc = 0.0;
  double nmapc_gap = 0.0;
};

/// gap = MAPC(last) - MAPC(penultimate); normalized by the mean MAPC over all layers.
GapReport nmapc_gap(std::span<const double> mapc_by_layer);
GapReport nmapc_gap(const LayerProfile& profile);

struct StabilityRow {
  std::size_t size = 0;
  double mapc_mean = 0.0;
  double mapc_std = 0.0;
};

/// MAPC over `trials` random neighbor subsets of each size. Subsets keep the
/// original neighbor order, so size == K reproduces the full batch exactly.
std::vector<StabilityRow> subsample_stability(const NeighborhoodBatch& batch, int d, std::span<const std::size_t> sizes,
                                              std::size_t trials, std::uint64_t seed,
                                              const CamlOptions& options = {});

/// relative_depth, mapc, mapc_std, id, pc_id, rd, mge
std::string profile_csv(const LayerProfile& profile);

}  // namespace curvekit
