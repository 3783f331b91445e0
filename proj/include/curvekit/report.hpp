#pragma once

// JSON views of results, shared by the CLI subcommands.

#include <json.hpp>

#include "curvekit/caml.hpp"
#include "curvekit/dimension.hpp"
#include "curvekit/profile.hpp"

namespace curvekit {

nlohmann::json to_json(const CurvatureResult& r);
CurvatureResult curvature_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IdEstimate& e);
nlohmann::json to_json(const SpectrumSummary& s);
nlohmann::json to_json(const Histogram& h);
nlohmann::json to_json(const LayerProfile& p);
LayerProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GapReport& g);

}  // namespace curvekit
