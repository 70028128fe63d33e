#include "alp/geo.hpp"

#include <algorithm>
#include <map>

namespace alp::geo {

MapExport build_map(const std::vector<ArtistLibrary>& libraries) {
  std::vector<const ArtistLibrary*> sorted;
  for (const auto& l : libraries) sorted.push_back(&l);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->slug < b->slug; });

  MapExport out;
  std::map<std::pair<double, double>, std::size_t> by_point;  // (lat, lon) -> feature index
  std::vector<std::vector<std::string>> sites;
  for (const ArtistLibrary* l : sorted) {
    LibraryRef ref{l->slug, l->artist_name, l->provenance};
    if (!l->located()) {
      out.unlocated.push_back(std::move(ref));
      continue;
    }
    const std::pair<double, double> key{*l->latitude, *l->longitude};
    auto [it, fresh] = by_point.emplace(key, out.features.size());
    if (fresh) {
      out.features.push_back(MapFeature{"", *l->longitude, *l->latitude, {}});
      sites.emplace_back();
    }
    out.features[it->second].libraries.push_back(std::move(ref));
    auto& names = sites[it->second];
    if (!l->holding_site.empty() && std::find(names.begin(), names.end(), l->holding_site) == names.end()) {
      names.push_back(l->holding_site);
    }
  }
  for (std::size_t i = 0; i < out.features.size(); ++i) {
    for (std::size_t k = 0; k < sites[i].size(); ++k) {
      out.features[i].site_name += (k ? " / " : "") + sites[i][k];
    }
  }
  std::sort(out.features.begin(), out.features.end(), [](const MapFeature& a, const MapFeature& b) {
    return std::pair(a.latitude, a.longitude) < std::pair(b.latitude, b.longitude);
  });
  return out;
}

namespace {

nlohmann::json refs_json(const std::vector<LibraryRef>& refs) {
  auto arr = nlohmann::json::array();
  for (const auto& r : refs) {
    arr.push_back({{"slug", r.slug}, {"artist_name", r.artist_name}, {"provenance", to_string(r.provenance)}});
  }
  return arr;
}

}  // namespace

nlohmann::json to_geojson(const MapExport& map) {
  auto features = nlohmann::json::array();
  for (const auto& f : map.features) {
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", {f.longitude, f.latitude}}}},
                        {"properties", {{"site_name", f.site_name}, {"libraries", refs_json(f.libraries)}}}});
  }
  return {{"type", "FeatureCollection"},
          {"schema_version", 1},
          {"features", std::move(features)},
          {"unlocated", refs_json(map.unlocated)}};
}

std::string export_geojson(const std::vector<ArtistLibrary>& libraries) {
  return to_geojson(build_map(libraries)).dump();
}

ArtistLibrary set_location(StoreWriter& writer, std::string_view slug, const Location& location) {
  auto libs = writer.libraries();
  auto it = std::find_if(libs.begin(), libs.end(), [&](const ArtistLibrary& l) { return l.slug == slug; });
  if (it == libs.end()) throw NotFoundError("unknown library '" + std::string(slug) + "'");
  ArtistLibrary lib = *it;
  lib.latitude = location.latitude;
  lib.longitude = location.longitude;
  if (location.site) lib.holding_site = *location.site;
  if (location.provenance) lib.provenance = *location.provenance;
  const auto problems = validate_library(lib);
  if (!problems.empty()) {
    throw PreconditionError("library " + lib.slug + ": " + problems.front().field + " " + problems.front().rule);
  }
  writer.put_library(lib);
  return lib;
}

}  // namespace alp::geo
