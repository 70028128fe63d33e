#pragma once

// Library locations and the map export. Libraries sharing exact coordinates
// are merged into one point feature.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "alp/catalog.hpp"
#include "alp/store.hpp"

namespace alp::geo {

inline constexpr std::string_view kMediaType = "application/geo+json";

struct LibraryRef {
  std::string slug;
  std::string artist_name;
  Provenance provenance = Provenance::MaterialFonds;

  friend bool operator==(const LibraryRef&, const LibraryRef&) = default;
};

struct MapFeature {
  std::string site_name;
  double longitude = 0.0;
  double latitude = 0.0;
  std::vector<LibraryRef> libraries;  // sorted by slug
};

struct MapExport {
  std::vector<MapFeature> features;  // sorted by (latitude, longitude)
  std::vector<LibraryRef> unlocated;
};

MapExport build_map(const std::vector<ArtistLibrary>& libraries);

// FeatureCollection with a top-level "unlocated" array and "schema_version".
nlohmann::json to_geojson(const MapExport& map);
// Serialized export; identical bytes for identical input.
std::string export_geojson(const std::vector<ArtistLibrary>& libraries);

struct Location {
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<std::string> site;
  std::optional<Provenance> provenance;
};

// Records where a library is kept. Throws NotFoundError for an unknown slug
// and PreconditionError for out-of-range coordinates.
ArtistLibrary set_location(StoreWriter& writer, std::string_view slug, const Location& location);

}  // namespace alp::geo
