#pragma once

// Structural GeoJSON check (RFC 7946) for the subset the map export uses:
// a FeatureCollection of Features with Point or null geometry.

#include <string>
#include <vector>

#include <json.hpp>

namespace alp::testing {

// Empty when `doc` is a valid FeatureCollection.
std::vector<std::string> geojson_problems(const nlohmann::json& doc);

}  // namespace alp::testing
