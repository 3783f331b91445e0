#include "curvekit/profile.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "curvekit/dimension.hpp"
#include "curvekit/error.hpp"
#include "curvekit/metrics.hpp"
#include "curvekit/random.hpp"

namespace curvekit {

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram curvature_histogram(std::span<const CurvatureResult> results, std::size_t bins, double decades) {
  if (results.empty()) throw Error(ErrorCode::EmptyInput, "no curvature results");
  if (bins == 0) throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  if (!(decades > 0.0)) throw Error(ErrorCode::InvalidArgument, "decades must be positive");

  double hi = 0.0;
  for (const auto& r : results) {
    if (r.count()) hi = std::max(hi, r.principal_curvatures.cwiseAbs().maxCoeff());
  }
  if (hi == 0.0) hi = 1.0;
  const double lo = hi * std::pow(10.0, -decades);

  // Positive-side magnitude edges, ascending; bins on each side = side.size() - 1.
  const bool odd = bins % 2 == 1;
  const std::size_t half = bins / 2;
  std::vector<double> side;
  if (odd) {
    if (half == 0) {
      side = {hi};
    } else {
      for (std::size_t j = 0; j <= half; ++j) side.push_back(lo * std::pow(hi / lo, double(j) / double(half)));
      side.back() = hi;
    }
  } else {
    side.push_back(0.0);
    if (half == 1) {
      side.push_back(hi);
    } else {
      for (std::size_t j = 0; j < half; ++j) side.push_back(lo * std::pow(hi / lo, double(j) / double(half - 1)));
      side.back() = hi;
    }
  }

  Histogram h;
  h.counts.assign(bins, 0);
  for (auto it = side.rbegin(); it != side.rend(); ++it) {
    if (*it != 0.0) h.edges.push_back(-*it);
  }
  if (!odd) h.edges.push_back(0.0);
  for (double m : side) {
    if (m != 0.0) h.edges.push_back(m);
  }

  auto side_bin = [&](double mag) {
    // First interval (side[j], side[j+1]] containing mag.
    auto it = std::lower_bound(side.begin() + 1, side.end(), mag);
    if (it == side.end()) --it;
    return std::size_t(it - side.begin()) - 1;
  };

  for (const auto& r : results) {
    for (Eigen::Index i = 0; i < r.principal_curvatures.size(); ++i) {
      const double v = r.principal_curvatures.data()[i];
      const double mag = std::abs(v);
      std::size_t bin;
      if (odd) {
        if (half == 0 || mag <= side.front()) {
          bin = half;
        } else {
          const std::size_t j = side_bin(mag);
          bin = v > 0.0 ? half + 1 + j : half - 1 - j;
        }
      } else {
        const std::size_t j = mag == 0.0 ? 0 : side_bin(mag);
        bin = v >= 0.0 ? half + j : half - 1 - j;
      }
      ++h.counts[bin];
    }
  }
  return h;
}

double relative_depth(std::uint32_t layer_index, std::uint32_t total_layers) {
  if (layer_index >= total_layers) {
    throw Error(ErrorCode::OrdinalOutOfRange, "layer index " + std::to_string(layer_index) + " >= total " +
                                                  std::to_string(total_layers));
  }
  if (total_layers < 2) return 0.0;
  return double(layer_index) / double(total_layers - 1);
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < count; i += threads) fn(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<std::size_t> evenly_spaced(std::size_t total, std::size_t wanted) {
  const std::size_t n = std::min(total, wanted);
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i * total / n;
  return out;
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / double(values.size() - 1));
}

Tensor2D base_rows(const Tensor2D& t, std::size_t block) {
  Tensor2D out(t.rows() / block, t.cols());
  for (std::size_t b = 0; b < out.rows(); ++b) {
    auto src = t.row(b * block);
    std::copy(src.begin(), src.end(), out.row(b).begin());
  }
  return out;
}

}  // namespace

LayerProfile build_profile(std::span<const LayerBundle> bundle, const ProfileConfig& config) {
  if (bundle.size() < 2) throw Error(ErrorCode::InvalidArgument, "profile needs at least 2 layers");
  if (config.points == 0) throw Error(ErrorCode::InvalidArgument, "profile needs at least one base point");
  const std::size_t rows = bundle.front().tensor.rows();
  const auto block_of = [](const LayerBundle& l) -> std::size_t {
    return l.tensor.ext.block_size ? *l.tensor.ext.block_size : 1;
  };
  const std::size_t block = block_of(bundle.front());
  for (const auto& layer : bundle) {
    if (layer.tensor.rows() != rows || block_of(layer) != block) {
      throw Error(ErrorCode::MisalignedBundle, "layer \"" + layer.layer_name + "\" has " +
                                                   std::to_string(layer.tensor.rows()) + " rows in blocks of " +
                                                   std::to_string(block_of(layer)) + "; expected " +
                                                   std::to_string(rows) + " in blocks of " + std::to_string(block));
    }
  }
  if (block > 1 && rows % block != 0) {
    throw Error(ErrorCode::MisalignedBundle, std::to_string(rows) + " rows do not split into blocks of " +
                                                 std::to_string(block));
  }

  LayerProfile profile;
  profile.note = "mapc_std is the standard deviation over base points within one bundle";

  for (const auto& layer : bundle) {
    const Tensor2D& t = layer.tensor;
    LayerRecord rec;
    rec.name = layer.layer_name;
    rec.layer_index = layer.layer_index;
    rec.relative_depth = relative_depth(layer.layer_index, layer.total_layers);

    // Dimension estimates run on un-augmented samples when there are enough of them.
    std::vector<NeighborhoodBatch> blocks;
    Tensor2D dim_data;
    if (block > 1) {
      blocks = batches_from_tensor(t);
      dim_data = blocks.size() >= 3 ? base_rows(t, block) : t;
    } else {
      dim_data = t;
    }
    rec.id = twonn_id(dim_data, config.discard_fraction).id;
    const auto spectrum = pc_id(dim_data, config.variance_threshold);
    rec.pc_id = spectrum.pc_id;
    rec.mge = spectrum.mge;
    rec.rd = relative_difference(double(rec.pc_id), rec.id);
    rec.d_used = config.fixed_d ? *config.fixed_d : round_id_for_caml(rec.id);

    const std::vector<std::size_t> picks = evenly_spaced(block > 1 ? blocks.size() : t.rows(), config.points);
    std::vector<CurvatureResult> results(picks.size());
    parallel_for(picks.size(), config.threads, [&](std::size_t i) {
      if (block > 1) {
        results[i] = estimate_point_curvature(blocks[picks[i]], rec.d_used, config.caml);
      } else {
        results[i] = estimate_point_curvature(knn_neighborhood(t, picks[i], config.k), rec.d_used, config.caml);
      }
    });

    std::vector<double> per_point;
    per_point.reserve(results.size());
    for (const auto& r : results) {
      per_point.push_back(mapc(std::span(&r, 1)));
      if (!r.rank_ok) ++rec.rank_deficient;
    }
    rec.points = results.size();
    rec.mapc = std::accumulate(per_point.begin(), per_point.end(), 0.0) / double(per_point.size());
    rec.mapc_std = sample_std(per_point);
    rec.histogram = curvature_histogram(results, config.bins);
    profile.layers.push_back(std::move(rec));
  }
  std::stable_sort(profile.layers.begin(), profile.layers.end(),
                   [](const LayerRecord& a, const LayerRecord& b) { return a.relative_depth < b.relative_depth; });
  return profile;
}

GapReport nmapc_gap(std::span<const double> mapc_by_layer) {
  if (mapc_by_layer.size() < 2) throw Error(ErrorCode::InvalidArgument, "gap needs at least 2 layers");
  GapReport g;
  const std::size_t n = mapc_by_layer.size();
  g.mapc_gap = mapc_by_layer[n - 1] - mapc_by_layer[n - 2];
  g.mean_mapc = std::accumulate(mapc_by_layer.begin(), mapc_by_layer.end(), 0.0) / double(n);
  if (!(g.mean_mapc > 0.0)) throw Error(ErrorCode::ZeroMeanMapc, "mean MAPC across layers is not positive");
  g.nmapc_gap = g.mapc_gap / g.mean_mapc;
  return g;
}

GapReport nmapc_gap(const LayerProfile& profile) {
  std::vector<double> values;
  for (const auto& l : profile.layers) values.push_back(l.mapc);
  return nmapc_gap(values);
}

std::vector<StabilityRow> subsample_stability(const NeighborhoodBatch& batch, int d, std::span<const std::size_t> sizes,
                                              std::size_t trials, std::uint64_t seed, const CamlOptions& options) {
  if (trials == 0) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  const std::size_t k = batch.size();
  std::vector<StabilityRow> table;
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), std::size_t{0});

  for (std::size_t size : sizes) {
    if (size > k) {
      throw Error(ErrorCode::SizeTooLarge, "subsample size " + std::to_string(size) + " exceeds K=" + std::to_string(k));
    }
    std::vector<double> values;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      auto rng = SplitMix64::stream(seed, (std::uint64_t(size) << 32) ^ trial);
      std::vector<std::size_t> pick = all;
      // Partial Fisher-Yates: the first `size` entries are a uniform subset.
      for (std::size_t i = 0; i < size; ++i) {
        const std::size_t j = i + std::size_t(rng() % (k - i));
        std::swap(pick[i], pick[j]);
      }
      pick.resize(size);
      std::sort(pick.begin(), pick.end());

      NeighborhoodBatch sub;
      sub.base = batch.base;
      sub.method = batch.method;
      sub.neighbors = Tensor2D(size, batch.neighbors.cols());
      for (std::size_t i = 0; i < size; ++i) {
        auto src = batch.neighbors.row(pick[i]);
        std::copy(src.begin(), src.end(), sub.neighbors.row(i).begin());
      }
      const auto result = estimate_point_curvature(sub, d, options);
      values.push_back(mapc(std::span(&result, 1)));
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    table.push_back({size, mean, std::sqrt(ss / double(values.size()))});
  }
  return table;
}

std::string profile_csv(const LayerProfile& profile) {
  std::ostringstream out;
  out.precision(17);
  out << "relative_depth,mapc,mapc_std,id,pc_id,rd,mge\n";
  for (const auto& l : profile.layers) {
    out << l.relative_depth << ',' << l.mapc << ',' << l.mapc_std << ',' << l.id << ',' << l.pc_id << ',' << l.rd
        << ',' << l.mge << '\n';
  }
  return out.str();
}

}  // namespace curvekit
