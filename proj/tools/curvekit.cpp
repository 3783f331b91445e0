#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "curvekit/caml.hpp"
#include "curvekit/dimension.hpp"
#include "curvekit/error.hpp"
#include "curvekit/metrics.hpp"
#include "curvekit/neighborhoods.hpp"
#include "curvekit/profile.hpp"
#include "curvekit/report.hpp"
#include "curvekit/synthetic.hpp"
#include "curvekit/tensor_io.hpp"

using namespace curvekit;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  return json::parse(in);
}

/// Parses "auto" or a positive integer.
std::optional<int> parse_d(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  int d = 0;
  try {
    d = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || d < 1) throw Error(ErrorCode::InvalidArgument, "--d must be a positive integer or auto");
  return d;
}

/// "random:<n>" or "coordinate".
PlaneSet parse_planes(const std::string& text, std::uint64_t seed) {
  if (text.empty() || text == "coordinate") return PlaneSet::coordinate();
  const std::string prefix = "random:";
  if (text.rfind(prefix, 0) == 0) {
    const auto n = std::stoul(text.substr(prefix.size()));
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "--planes random:<n> needs n >= 1");
    return PlaneSet::random(n, seed);
  }
  throw Error(ErrorCode::InvalidArgument, "--planes must be coordinate or random:<n>");
}

/// d for a batch file: TwoNN on the base rows when there are enough blocks,
/// otherwise on every row.
int auto_d(const Tensor2D& t, const std::vector<NeighborhoodBatch>& blocks) {
  if (blocks.size() >= 3) {
    Tensor2D bases(blocks.size(), t.cols());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      std::copy(blocks[b].base.data(), blocks[b].base.data() + blocks[b].base.size(), bases.row(b).begin());
    }
    return round_id_for_caml(twonn_id(bases).id);
  }
  return round_id_for_caml(twonn_id(t).id);
}

std::vector<CurvatureResult> results_from_json(const json& j) {
  std::vector<CurvatureResult> out;
  if (j.contains("results")) {
    for (const auto& r : j["results"]) out.push_back(curvature_from_json(r));
  }
  if (j.contains("layers")) {
    for (const auto& layer : j["layers"]) {
      for (const auto& r : layer.at("results")) out.push_back(curvature_from_json(r));
    }
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no curvature results in input");
  return out;
}

std::vector<Eigen::MatrixXd> hessians_of(const CurvatureResult& r) {
  if (!r.hessians.empty()) return r.hessians;
  // Principal curvatures alone determine the Hessians up to a tangent rotation,
  // which leaves every Riemann-based metric unchanged.
  std::vector<Eigen::MatrixXd> hs;
  for (Eigen::Index a = 0; a < r.principal_curvatures.rows(); ++a) {
    hs.emplace_back(r.principal_curvatures.row(a).transpose().asDiagonal());
  }
  return hs;
}

struct GenArgs {
  std::string shape = "sphere";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out;
  double radius = 1.0;
  double a = 3.0, b = 2.0, c = 1.0;
  int d = 2;
  int ambient = 3;
  double extent = 0.1;
  double noise = 0.0;
  double curvature = 1.0;
  std::uint32_t layers = 4;
  std::size_t height = 32, width = 32, channels = 3;
  bool real32 = false;
};

void run_gen(const GenArgs& g) {
  const DType dtype = g.real32 ? DType::Real32 : DType::Real64;
  if (g.shape == "sphere") {
    save_tensor(sample_sphere(g.radius, g.n, g.seed), g.out, dtype);
  } else if (g.shape == "ellipsoid") {
    save_tensor(sample_ellipsoid({g.a, g.b, g.c}, g.n, g.seed), g.out, dtype);
  } else if (g.shape == "patch") {
    QuadraticPatchSpec spec;
    spec.d = g.d;
    spec.ambient = g.ambient;
    spec.extent = g.extent;
    spec.noise_sigma = g.noise;
    spec.hessians = random_symmetric_hessians(g.d, g.ambient - g.d, g.curvature, g.seed);
    save_tensor(sample_quadratic_patch(spec, g.n, g.seed), g.out, dtype);
  } else if (g.shape == "image") {
    save_tensor(image_to_tensor(synthetic_image(g.height, g.width, g.channels, g.seed)), g.out, dtype);
  } else if (g.shape == "bundle") {
    // Layer l is a surface patch whose curvature grows with depth; the last
    // layer is a sphere.
    if (g.layers < 2) throw Error(ErrorCode::InvalidArgument, "--layers must be >= 2");
    std::vector<LayerBundle> bundle;
    for (std::uint32_t l = 0; l < g.layers; ++l) {
      Tensor2D t;
      if (l + 1 == g.layers) {
        t = sample_sphere(g.radius, g.n, g.seed + l);
      } else {
        QuadraticPatchSpec spec;
        spec.extent = 1.0;
        spec.hessians = {Eigen::MatrixXd::Identity(2, 2) * (0.1 * double(l))};
        t = sample_quadratic_patch(spec, g.n, g.seed + l);
      }
      bundle.push_back({"layer" + std::to_string(l), l, g.layers, std::move(t)});
    }
    save_bundle(bundle, g.out, dtype);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown shape " + g.shape);
  }
}

struct NeighborhoodArgs {
  std::string method = "svd";
  std::string in, out;
  int tail = 10;
  std::size_t k = 50;
  std::size_t n = 64;
  std::uint64_t seed = 0;
  std::size_t index = 0;
};

void run_neighborhoods(const NeighborhoodArgs& a) {
  const Tensor2D input = load_tensor(a.in);
  NeighborhoodBatch batch;
  if (a.method == "svd") {
    batch = svd_neighborhood(image_from_tensor(input), SvdTruncationPlan::exhaustive(a.tail));
  } else if (a.method == "affine") {
    batch = affine_neighborhood(image_from_tensor(input), a.n, a.seed);
  } else if (a.method == "knn") {
    batch = knn_neighborhood(input, a.index, a.k);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown method " + a.method);
  }
  save_tensor(batch_to_tensor(batch), a.out);
  std::cerr << "wrote " << batch.size() << " neighbors, mean distance to center "
            << mean_distance_to_center(batch) << '\n';
}

struct IdArgs {
  std::string in, json_out;
  bool twonn = false, pcid = false;
  double threshold = 0.9;
  double discard = 0.1;
};

void run_id(const IdArgs& a) {
  const Tensor2D data = load_tensor(a.in);
  const bool both = a.twonn == a.pcid;
  json out = json::object();
  if (a.twonn || both) out["twonn"] = to_json(twonn_id(data, a.discard));
  if (a.pcid || both) out["pcid"] = to_json(pc_id(data, a.threshold));
  if (both) out["rd"] = relative_difference(double(out["pcid"]["pc_id"].get<std::size_t>()), out["twonn"]["id"]);
  emit(out, a.json_out);
}

struct CurvatureArgs {
  std::string in, bundle, json_out;
  std::string d = "auto";
  std::size_t k = 200;
  std::size_t points = 100;
  bool strict = false;
};

void run_curvature(const CurvatureArgs& a) {
  CamlOptions opts;
  opts.require_rank = a.strict;
  const std::optional<int> fixed = parse_d(a.d);
  json out;
  if (!a.in.empty()) {
    const Tensor2D t = load_tensor(a.in);
    const auto blocks = batches_from_tensor(t);
    const int d = fixed ? *fixed : auto_d(t, blocks);
    json results = json::array();
    for (const auto& b : blocks) results.push_back(to_json(estimate_point_curvature(b, d, opts)));
    out = {{"d", d}, {"results", std::move(results)}};
  } else {
    json layers = json::array();
    for (const auto& layer : load_bundle(a.bundle)) {
      const Tensor2D& t = layer.tensor;
      json results = json::array();
      int d = 0;
      if (t.ext.block_size) {
        const auto blocks = batches_from_tensor(t);
        d = fixed ? *fixed : auto_d(t, blocks);
        const std::size_t count = std::min(a.points, blocks.size());
        for (std::size_t i = 0; i < count; ++i) {
          results.push_back(to_json(estimate_point_curvature(blocks[i * blocks.size() / count], d, opts)));
        }
      } else {
        d = fixed ? *fixed : round_id_for_caml(twonn_id(t).id);
        const std::size_t count = std::min(a.points, t.rows());
        std::vector<std::size_t> bases;
        for (std::size_t i = 0; i < count; ++i) bases.push_back(i * t.rows() / count);
        for (const auto& r : estimate_knn_curvatures(t, bases, a.k, d, opts)) results.push_back(to_json(r));
      }
      layers.push_back({{"name", layer.layer_name},
                        {"layer_index", layer.layer_index},
                        {"d", d},
                        {"results", std::move(results)}});
    }
    out = {{"layers", std::move(layers)}};
  }
  emit(out, a.json_out);
}

struct MetricsArgs {
  std::string in, json_out;
  std::string metric = "mapc";
  std::string planes;
  std::uint64_t seed = 0;
};

void run_metrics(const MetricsArgs& a) {
  const auto results = results_from_json(read_json(a.in));
  double value = 0.0;
  if (a.metric == "mapc") {
    value = mapc(results);
  } else if (a.metric == "mamc") {
    value = mamc(results);
  } else if (a.metric == "marc" || a.metric == "masc") {
    const PlaneSet planes = parse_planes(a.planes, a.seed);
    MeanAccumulator acc;
    for (const auto& r : results) {
      const auto hs = hessians_of(r);
      const RiemannTensor tensor = riemann_tensor(hs);
      acc.add(a.metric == "marc" ? marc(tensor) : masc(tensor, planes));
    }
    value = acc.mean();
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown metric " + a.metric);
  }
  emit({{"metric", a.metric}, {"value", value}, {"points", results.size()}}, a.json_out);
}

struct ProfileArgs {
  std::string bundle, json_out, csv_out;
  std::size_t points = 100;
  std::size_t k = 200;
  std::string d = "auto";
  std::size_t threads = 1;
  std::size_t bins = 41;
};

void run_profile(const ProfileArgs& a) {
  ProfileConfig cfg;
  cfg.points = a.points;
  cfg.k = a.k;
  cfg.fixed_d = parse_d(a.d);
  cfg.threads = a.threads;
  cfg.bins = a.bins;
  const LayerProfile profile = build_profile(load_bundle(a.bundle), cfg);
  if (!a.csv_out.empty()) {
    std::ofstream csv(a.csv_out);
    if (!csv) throw Error(ErrorCode::IoFailure, "cannot write " + a.csv_out);
    csv << profile_csv(profile);
  }
  if (!a.json_out.empty() || a.csv_out.empty()) emit(to_json(profile), a.json_out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature and intrinsic-dimension analysis of point clouds and layer bundles"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--shape", gen.shape)->check(CLI::IsMember({"sphere", "ellipsoid", "patch", "image", "bundle"}));
  gen_cmd->add_option("--n", gen.n, "Number of points");
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_option("--radius", gen.radius);
  gen_cmd->add_option("--a", gen.a);
  gen_cmd->add_option("--b", gen.b);
  gen_cmd->add_option("--c", gen.c);
  gen_cmd->add_option("--d", gen.d, "Patch intrinsic dimension");
  gen_cmd->add_option("--ambient", gen.ambient, "Patch ambient dimension");
  gen_cmd->add_option("--extent", gen.extent);
  gen_cmd->add_option("--noise", gen.noise);
  gen_cmd->add_option("--curvature", gen.curvature, "Scale of random patch Hessian entries");
  gen_cmd->add_option("--layers", gen.layers);
  gen_cmd->add_option("--height", gen.height);
  gen_cmd->add_option("--width", gen.width);
  gen_cmd->add_option("--channels", gen.channels);
  gen_cmd->add_flag("--real32", gen.real32, "Store values as 32-bit floats");

  NeighborhoodArgs nb;
  auto* nb_cmd = app.add_subcommand("neighborhoods", "Build a neighborhood batch");
  nb_cmd->add_option("--method", nb.method)->check(CLI::IsMember({"svd", "knn", "affine"}));
  nb_cmd->add_option("--in", nb.in)->required();
  nb_cmd->add_option("--out", nb.out)->required();
  nb_cmd->add_option("--tail", nb.tail);
  nb_cmd->add_option("--k", nb.k);
  nb_cmd->add_option("--n", nb.n);
  nb_cmd->add_option("--seed", nb.seed);
  nb_cmd->add_option("--index", nb.index, "Base row for kNN");

  IdArgs id;
  auto* id_cmd = app.add_subcommand("id", "Estimate intrinsic and linear dimension");
  id_cmd->add_option("--in", id.in)->required();
  id_cmd->add_flag("--twonn", id.twonn);
  id_cmd->add_flag("--pcid", id.pcid);
  id_cmd->add_option("--threshold", id.threshold);
  id_cmd->add_option("--discard", id.discard);
  id_cmd->add_option("--json", id.json_out);

  CurvatureArgs cv;
  auto* cv_cmd = app.add_subcommand("curvature", "Estimate principal curvatures");
  auto* cv_in = cv_cmd->add_option("--in", cv.in, "Batch tensor of (base, neighbors...) blocks");
  auto* cv_bundle = cv_cmd->add_option("--bundle", cv.bundle);
  cv_in->excludes(cv_bundle);
  cv_cmd->add_option("--d", cv.d, "Intrinsic dimension or auto");
  cv_cmd->add_option("--k", cv.k);
  cv_cmd->add_option("--points", cv.points);
  cv_cmd->add_flag("--strict", cv.strict, "Fail on rank-deficient neighborhoods");
  cv_cmd->add_option("--json", cv.json_out);

  MetricsArgs mt;
  auto* mt_cmd = app.add_subcommand("metrics", "Aggregate curvature results");
  mt_cmd->add_option("--in", mt.in)->required();
  mt_cmd->add_option("--metric", mt.metric)->check(CLI::IsMember({"mapc", "mamc", "marc", "masc"}));
  mt_cmd->add_option("--planes", mt.planes, "coordinate or random:<n>");
  mt_cmd->add_option("--seed", mt.seed);
  mt_cmd->add_option("--json", mt.json_out)->expected(0, 1);

  ProfileArgs pf;
  auto* pf_cmd = app.add_subcommand("profile", "Per-layer curvature and dimension profile");
  pf_cmd->add_option("--bundle", pf.bundle)->required();
  pf_cmd->add_option("--points", pf.points);
  pf_cmd->add_option("--k", pf.k);
  pf_cmd->add_option("--d", pf.d);
  pf_cmd->add_option("--threads", pf.threads);
  pf_cmd->add_option("--bins", pf.bins);
  pf_cmd->add_option("--json", pf.json_out);
  pf_cmd->add_option("--csv", pf.csv_out);

  std::string gap_profile, gap_json;
  auto* gap_cmd = app.add_subcommand("gap", "Normalized MAPC gap of a profile");
  gap_cmd->add_option("--profile", gap_profile)->required();
  gap_cmd->add_option("--json", gap_json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) run_gen(gen);
    if (*nb_cmd) run_neighborhoods(nb);
    if (*id_cmd) run_id(id);
    if (*cv_cmd) {
      if (cv.in.empty() == cv.bundle.empty()) throw Error(ErrorCode::InvalidArgument, "give exactly one of --in, --bundle");
      run_curvature(cv);
    }
    if (*mt_cmd) run_metrics(mt);
    if (*pf_cmd) run_profile(pf);
    if (*gap_cmd) emit(to_json(nmapc_gap(profile_from_json(read_json(gap_profile)))), gap_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
