#pragma once

#include <string>

#include <json.hpp>

#include "wlab/isometries.hpp"
#include "wlab/transport.hpp"

namespace wlab {

nlohmann::json space_to_json(const GroundSpace& space);
GroundSpace space_from_json(const nlohmann::json& j);

// {"space": {...}, "atoms": [{"point": [...], "weight": w}, ...]}
// Weights must sum to 1 within 1e-9 on ingest; they are renormalized to the
// internal 1e-12 invariant.
nlohmann::json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& mu, const std::string& path);

// {"source": <measure>, "target": <measure>, "mass": [[...]]}
nlohmann::json plan_to_json(const TransportPlan& plan);
TransportPlan plan_from_json(const nlohmann::json& j);

nlohmann::json decomposition_to_json(const GroundSpace& space,
                                     const SignedDecomposition& dec);

nlohmann::json isometry_report_to_json(const IsometryTrialReport& report);

}  // namespace wlab
