#include "support/geojson_check.hpp"

namespace alp::testing {

namespace {

void check_position(const nlohmann::json& p, const std::string& where, std::vector<std::string>& out) {
  if (!p.is_array() || p.size() < 2 || p.size() > 3) {
    out.push_back(where + ": position must be an array of 2 or 3 numbers");
    return;
  }
  for (const auto& n : p) {
    if (!n.is_number()) {
      out.push_back(where + ": position member is not a number");
      return;
    }
  }
  const double lon = p[0].get<double>();
  const double lat = p[1].get<double>();
  if (lon < -180.0 || lon > 180.0) out.push_back(where + ": longitude out of range");
  if (lat < -90.0 || lat > 90.0) out.push_back(where + ": latitude out of range");
}

}  // namespace

std::vector<std::string> geojson_problems(const nlohmann::json& doc) {
  std::vector<std::string> out;
  if (!doc.is_object()) return {"root is not an object"};
  if (doc.value("type", "") != "FeatureCollection") out.push_back("root type is not FeatureCollection");
  if (!doc.contains("features") || !doc["features"].is_array()) {
    out.push_back("features is not an array");
    return out;
  }
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const auto& f = doc["features"][i];
    const std::string where = "features[" + std::to_string(i) + "]";
    if (!f.is_object() || f.value("type", "") != "Feature") {
      out.push_back(where + ": not a Feature");
      continue;
    }
    if (!f.contains("geometry")) out.push_back(where + ": missing geometry");
    if (!f.contains("properties")) out.push_back(where + ": missing properties");
    if (f.contains("properties") && !f["properties"].is_object() && !f["properties"].is_null()) {
      out.push_back(where + ": properties must be an object or null");
    }
    if (f.contains("geometry") && !f["geometry"].is_null()) {
      const auto& g = f["geometry"];
      if (!g.is_object() || g.value("type", "") != "Point") {
        out.push_back(where + ": geometry is not a Point");
      } else if (!g.contains("coordinates")) {
        out.push_back(where + ": Point without coordinates");
      } else {
        check_position(g["coordinates"], where, out);
      }
    }
  }
  return out;
}

}  // namespace alp::testing
