#include "alp/json_codec.hpp"

#include "alp/error.hpp"

namespace alp::json_codec {
namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

template <typename T>
std::optional<T> optional_number(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ParseError(std::string("field '") + key + "' must be a number");
  return it->get<T>();
}

template <typename Enum, typename Parser>
Enum require_enum(const Json& j, const char* key, Parser parse) {
  const std::string text = require_string(j, key);
  auto v = parse(text);
  if (!v) throw ParseError(std::string("field '") + key + "' has unknown value '" + text + "'");
  return *v;
}

const Json& optional_array(const Json& j, const char* key) {
  static const Json empty = Json::array();
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return empty;
  if (!it->is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  return *it;
}

}  // namespace

Json to_json(const DcElement& element) {
  Json j{{"element", element.name}, {"value", element.value}};
  if (element.qualifier) j["qualifier"] = *element.qualifier;
  if (element.lang) j["lang"] = *element.lang;
  return j;
}

Json to_json(const ReadingMark& mark) {
  Json j{{"kind", to_string(mark.kind)}, {"locus", mark.locus}, {"asset_ids", mark.asset_ids}};
  if (mark.transcription) j["transcription"] = *mark.transcription;
  return j;
}

Json to_json(const DigitalSurrogate& s) {
  return Json{{"provider", to_string(s.provider)},
              {"provider_record_id", s.provider_record_id},
              {"access_url", s.access_url},
              {"match_level", to_string(s.match_level)},
              {"total_score", s.total_score}};
}

Json to_json(const BibRecord& record) {
  Json j{{"record_id", record.record_id},
         {"library", record.library_slug},
         {"rights", to_string(record.rights)},
         {"datestamp", record.datestamp},
         {"elements", Json::array()},
         {"marks", Json::array()},
         {"surrogates", Json::array()}};
  for (const auto& e : record.elements) j["elements"].push_back(to_json(e));
  for (const auto& m : record.marks) j["marks"].push_back(to_json(m));
  for (const auto& s : record.surrogates) j["surrogates"].push_back(to_json(s));
  if (record.shelf_mark) j["shelf_mark"] = *record.shelf_mark;
  return j;
}

Json to_json(const ArtistLibrary& library) {
  Json j{{"slug", library.slug},
         {"artist_name", library.artist_name},
         {"provenance", to_string(library.provenance)},
         {"holding_site", library.holding_site},
         {"description", library.description}};
  if (library.birth_year) j["birth_year"] = *library.birth_year;
  if (library.death_year) j["death_year"] = *library.death_year;
  if (library.latitude) j["latitude"] = *library.latitude;
  if (library.longitude) j["longitude"] = *library.longitude;
  return j;
}

Json to_json(const AssetRecord& asset) {
  Json j{{"asset_id", asset.asset_id},
         {"record_id", asset.record_id},
         {"kind", to_string(asset.kind)},
         {"rights", to_string(asset.rights)},
         {"original", asset.original},
         {"media_type", asset.media_type}};
  if (asset.derivative) j["derivative"] = *asset.derivative;
  return j;
}

DcElement element_from_json(const Json& j) {
  return DcElement{require_string(j, "element"), optional_string(j, "qualifier"),
                   require_string(j, "value"), optional_string(j, "lang")};
}

ReadingMark mark_from_json(const Json& j) {
  ReadingMark m;
  m.kind = require_enum<MarkKind>(j, "kind", parse_mark_kind);
  m.locus = require_string(j, "locus");
  m.transcription = optional_string(j, "transcription");
  for (const auto& id : optional_array(j, "asset_ids")) {
    if (!id.is_string()) throw ParseError("asset_ids must contain strings");
    m.asset_ids.push_back(id.get<std::string>());
  }
  return m;
}

DigitalSurrogate surrogate_from_json(const Json& j) {
  DigitalSurrogate s;
  s.provider = require_enum<Provider>(j, "provider", parse_provider);
  s.provider_record_id = require_string(j, "provider_record_id");
  s.access_url = require_string(j, "access_url");
  s.match_level = require_enum<MatchLevel>(j, "match_level", parse_match_level);
  s.total_score = optional_number<double>(j, "total_score").value_or(0.0);
  return s;
}

BibRecord record_from_json(const Json& j) {
  BibRecord r;
  r.record_id = require_string(j, "record_id");
  r.library_slug = require_string(j, "library");
  r.rights = j.contains("rights") ? require_enum<Rights>(j, "rights", parse_rights) : Rights::Unknown;
  r.datestamp = optional_string(j, "datestamp").value_or("");
  r.shelf_mark = optional_string(j, "shelf_mark");
  for (const auto& e : optional_array(j, "elements")) r.elements.push_back(element_from_json(e));
  for (const auto& m : optional_array(j, "marks")) r.marks.push_back(mark_from_json(m));
  for (const auto& s : optional_array(j, "surrogates")) r.surrogates.push_back(surrogate_from_json(s));
  return r;
}

ArtistLibrary library_from_json(const Json& j) {
  ArtistLibrary l;
  l.slug = require_string(j, "slug");
  l.artist_name = require_string(j, "artist_name");
  l.provenance = require_enum<Provenance>(j, "provenance", parse_provenance);
  l.holding_site = optional_string(j, "holding_site").value_or("");
  l.description = optional_string(j, "description").value_or("");
  l.birth_year = optional_number<int>(j, "birth_year");
  l.death_year = optional_number<int>(j, "death_year");
  l.latitude = optional_number<double>(j, "latitude");
  l.longitude = optional_number<double>(j, "longitude");
  return l;
}

AssetRecord asset_from_json(const Json& j) {
  AssetRecord a;
  a.asset_id = require_string(j, "asset_id");
  a.record_id = require_string(j, "record_id");
  a.kind = require_enum<AssetKind>(j, "kind", parse_asset_kind);
  a.rights = require_enum<Rights>(j, "rights", parse_rights);
  a.original = require_string(j, "original");
  a.derivative = optional_string(j, "derivative");
  a.media_type = optional_string(j, "media_type").value_or("application/octet-stream");
  return a;
}

}  // namespace alp::json_codec
