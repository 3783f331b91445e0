#include "curvekit/report.hpp"

#include "curvekit/error.hpp"

namespace curvekit {

using nlohmann::json;

namespace {

json matrix_rows(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd rows_matrix(const json& rows, Eigen::Index cols) {
  Eigen::MatrixXd m(Eigen::Index(rows.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto& row = rows.at(std::size_t(i));
    if (Eigen::Index(row.size()) != cols) throw Error(ErrorCode::ShapeMismatch, "ragged matrix in JSON");
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = row.at(std::size_t(j)).get<double>();
  }
  return m;
}

}  // namespace

json to_json(const CurvatureResult& r) {
  json hessians = json::array();
  for (const auto& h : r.hessians) hessians.push_back(matrix_rows(h));
  return {{"d", r.d},
          {"codim", r.codim()},
          {"rank_ok", r.rank_ok},
          {"ill_conditioned", r.ill_conditioned},
          {"principal_curvatures", matrix_rows(r.principal_curvatures)},
          {"hessians", std::move(hessians)}};
}

CurvatureResult curvature_from_json(const json& j) {
  CurvatureResult r;
  r.d = j.at("d").get<int>();
  r.rank_ok = j.value("rank_ok", true);
  r.ill_conditioned = j.value("ill_conditioned", false);
  r.principal_curvatures = rows_matrix(j.at("principal_curvatures"), r.d);
  for (const auto& h : j.value("hessians", json::array())) r.hessians.push_back(rows_matrix(h, r.d));
  return r;
}

json to_json(const IdEstimate& e) {
  return {{"id", e.id}, {"n_used", e.n_used}, {"n_points", e.n_points}, {"discard_fraction", e.discard_fraction}};
}

json to_json(const SpectrumSummary& s) {
  return {{"pc_id", s.pc_id}, {"mge", s.mge}, {"eigenvalues", s.eigenvalues}};
}

json to_json(const Histogram& h) { return {{"edges", h.edges}, {"counts", h.counts}}; }

json to_json(const LayerProfile& p) {
  json layers = json::array();
  for (const auto& l : p.layers) {
    layers.push_back({{"name", l.name},
                      {"layer_index", l.layer_index},
                      {"relative_depth", l.relative_depth},
                      {"mapc", l.mapc},
                      {"mapc_std", l.mapc_std},
                      {"id", l.id},
                      {"d_used", l.d_used},
                      {"pc_id", l.pc_id},
                      {"rd", l.rd},
                      {"mge", l.mge},
                      {"points", l.points},
                      {"rank_deficient", l.rank_deficient},
                      {"histogram", to_json(l.histogram)}});
  }
  return {{"layers", std::move(layers)}, {"note", p.note}};
}

LayerProfile profile_from_json(const json& j) {
  LayerProfile p;
  p.note = j.value("note", "");
  for (const auto& l : j.at("layers")) {
    LayerRecord r;
    r.name = l.value("name", "");
    r.layer_index = l.value("layer_index", 0U);
    r.relative_depth = l.at("relative_depth").get<double>();
    r.mapc = l.at("mapc").get<double>();
    r.mapc_std = l.value("mapc_std", 0.0);
    r.id = l.value("id", 0.0);
    r.d_used = l.value("d_used", 0);
    r.pc_id = l.value("pc_id", std::size_t{0});
    r.rd = l.value("rd", 0.0);
    r.mge = l.value("mge", 0.0);
    r.points = l.value("points", std::size_t{0});
    r.rank_deficient = l.value("rank_deficient", std::size_t{0});
    if (l.contains("histogram")) {
      r.histogram.edges = l["histogram"].value("edges", std::vector<double>{});
      r.histogram.counts = l["histogram"].value("counts", std::vector<std::size_t>{});
    }
    p.layers.push_back(std::move(r));
  }
  return p;
}

json to_json(const GapReport& g) {
  return {{"mapc_gap", g.mapc_gap}, {"mean_mapc", g.mean_mapc}, {"nmapc_gap", g.nmapc_gap}};
}

}  // namespace curvekit
