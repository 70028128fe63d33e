#include "alp/api.hpp"

#include <algorithm>

#include "alp/assets.hpp"
#include "alp/comparison.hpp"
#include "alp/geo.hpp"
#include "alp/json_codec.hpp"
#include "alp/textnorm.hpp"

namespace alp::api {

using nlohmann::json;

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadQuery: return "BadQuery";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::AccessDenied: return "AccessDenied";
    case ErrorCode::Internal: return "Internal";
  }
  return "Internal";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadQuery: return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::AccessDenied: return 403;
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  auto hex = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() + 0 && hex(text[i + 1]) >= 0 && hex(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex(text[i + 1]) * 16 + hex(text[i + 2])));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::multimap<std::string, std::string> parse_form(std::string_view text) {
  std::multimap<std::string, std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto amp = text.find('&', start);
    if (amp == std::string_view::npos) amp = text.size();
    std::string pair(text.substr(start, amp - start));
    std::replace(pair.begin(), pair.end(), '+', ' ');
    if (!pair.empty()) {
      const auto eq = pair.find('=');
      if (eq == std::string::npos) out.emplace(percent_decode(pair), "");
      else out.emplace(percent_decode(pair.substr(0, eq)), percent_decode(pair.substr(eq + 1)));
    }
    start = amp + 1;
  }
  return out;
}

namespace {

// Thrown inside handlers and turned into an error response.
struct ApiError {
  ErrorCode code;
  std::string message;
  json detail;
};

Response ok(json body, std::string content_type = "application/json") {
  json out = {{"schema_version", kSchemaVersion}};
  out.update(body);
  Response r;
  r.content_type = std::move(content_type);
  r.body = out.dump();
  return r;
}

Response error_response(const ApiError& e) {
  json err = {{"code", to_string(e.code)}, {"message", e.message}};
  if (!e.detail.is_null()) err["detail"] = e.detail;
  Response r;
  r.status = http_status(e.code);
  r.body = json{{"schema_version", kSchemaVersion}, {"error", err}}.dump();
  return r;
}

std::optional<std::string> param(const Request& r, const std::string& key) {
  auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  return it->second;
}

int int_param(const Request& r, const std::string& key, int fallback, int lo, int hi) {
  const auto v = param(r, key);
  if (!v || v->empty()) return fallback;
  int n = 0;
  try {
    std::size_t used = 0;
    n = std::stoi(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
  } catch (const std::exception&) {
    throw ApiError{ErrorCode::BadQuery, key + " must be an integer", json{{"parameter", key}}};
  }
  if (n < lo || n > hi) {
    throw ApiError{ErrorCode::BadQuery, key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                   json{{"parameter", key}}};
  }
  return n;
}

struct Page {
  int page = 1;
  int per_page = kDefaultPerPage;
  template <class T>
  std::pair<std::size_t, std::size_t> bounds(const std::vector<T>& items) const {
    const std::size_t begin = std::min(items.size(), static_cast<std::size_t>(page - 1) * per_page);
    return {begin, std::min(items.size(), begin + per_page)};
  }
  json meta(std::size_t total) const { return {{"total", total}, {"page", page}, {"per_page", per_page}}; }
};

Page page_of(const Request& r) {
  return Page{int_param(r, "page", 1, 1, 1000000), int_param(r, "per_page", kDefaultPerPage, 1, kMaxPerPage)};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    auto item = textnorm::trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

json optional_first(const BibRecord& r, std::string_view name) {
  auto v = r.first(name);
  return v ? json(*v) : json(nullptr);
}

json summary(const BibRecord& r) {
  json s = {{"record_id", r.record_id},
            {"library", r.library_slug},
            {"title", optional_first(r, "title")},
            {"creator", optional_first(r, "creator")},
            {"date", optional_first(r, "date")},
            {"publisher", optional_first(r, "publisher")},
            {"match_level", nullptr}};
  if (!r.surrogates.empty()) s["match_level"] = to_string(r.surrogates.front().match_level);
  return s;
}

json library_json(const Snapshot& snap, const ArtistLibrary& l) {
  json j = json_codec::to_json(l);
  j["record_count"] = snap.records_of(l.slug).size();
  return j;
}

}  // namespace

Service::Service(std::shared_ptr<const Snapshot> snapshot, std::shared_ptr<const query::SearchIndex> index,
                 oai::Config oai_config, Clock clock)
    : snapshot_(std::move(snapshot)),
      index_(index ? std::move(index) : query::SearchIndex::build(snapshot_->records())),
      oai_(snapshot_, std::move(oai_config), std::move(clock)) {}

Response Service::handle(const Request& r) const {
  try {
    std::vector<std::string> parts;
    {
      std::size_t start = 1;
      if (r.path.empty() || r.path[0] != '/') throw ApiError{ErrorCode::NotFound, "no such resource", nullptr};
      while (start <= r.path.size()) {
        const auto slash = r.path.find('/', start);
        parts.push_back(percent_decode(r.path.substr(start, slash == std::string::npos ? std::string::npos : slash - start)));
        if (slash == std::string::npos) break;
        start = slash + 1;
      }
    }
    if (parts.size() == 1 && parts[0] == "oai") {
      if (r.method != "GET" && r.method != "POST") {
        throw ApiError{ErrorCode::BadQuery, "/oai accepts GET and POST", nullptr};
      }
      return oai(r);
    }
    if (parts.empty() || parts[0] != "api") throw ApiError{ErrorCode::NotFound, "no such resource", nullptr};
    if (r.method != "GET") throw ApiError{ErrorCode::BadQuery, "the API is read-only; use GET", nullptr};

    const std::size_t n = parts.size();
    if (n == 2 && parts[1] == "libraries") return libraries(r);
    if (n == 3 && parts[1] == "libraries") return library(r, parts[2]);
    if (n == 3 && parts[1] == "records") return record(parts[2]);
    if (n == 2 && parts[1] == "search") return search(r);
    if (n == 2 && parts[1] == "compare") return compare(r);
    if (n == 2 && parts[1] == "authors") return authors(r);
    if (n == 2 && parts[1] == "map.geojson") return map();
    if (n == 3 && parts[1] == "assets") return asset(r, parts[2]);
    throw ApiError{ErrorCode::NotFound, "no such resource", nullptr};
  } catch (const ApiError& e) {
    return error_response(e);
  } catch (const std::exception&) {
    return error_response({ErrorCode::Internal, "internal error", nullptr});
  }
}

Response Service::libraries(const Request& r) const {
  const Page page = page_of(r);
  const auto& libs = snapshot_->libraries();
  const auto [b, e] = page.bounds(libs);
  json items = json::array();
  for (std::size_t i = b; i < e; ++i) items.push_back(library_json(*snapshot_, libs[i]));
  json out = page.meta(libs.size());
  out["libraries"] = std::move(items);
  return ok(std::move(out));
}

Response Service::library(const Request& r, const std::string& slug) const {
  const ArtistLibrary* lib = snapshot_->library(slug);
  if (!lib) throw ApiError{ErrorCode::NotFound, "unknown library '" + slug + "'", nullptr};
  const Page page = page_of(r);
  const auto recs = snapshot_->records_of(slug);
  const auto [b, e] = page.bounds(recs);
  json items = json::array();
  for (std::size_t i = b; i < e; ++i) items.push_back(summary(*recs[i]));
  json records = page.meta(recs.size());
  records["items"] = std::move(items);
  return ok({{"library", library_json(*snapshot_, *lib)}, {"records", std::move(records)}});
}

Response Service::record(const std::string& record_id) const {
  const BibRecord* rec = snapshot_->record(record_id);
  if (!rec) throw ApiError{ErrorCode::NotFound, "unknown record '" + record_id + "'", nullptr};
  json assets_json = json::array();
  for (const auto& a : snapshot_->assets()) {
    if (a.record_id != rec->record_id) continue;
    json variants = json::object();
    for (auto v : {assets::Variant::Original, assets::Variant::Derivative}) {
      const std::string name(assets::to_string(v));
      variants[name] = std::holds_alternative<assets::Allowed>(assets::resolve_variant(a, v))
                           ? json("/api/assets/" + a.asset_id + "?variant=" + name)
                           : json(nullptr);
    }
    assets_json.push_back({{"asset_id", a.asset_id},
                           {"kind", to_string(a.kind)},
                           {"rights", to_string(a.rights)},
                           {"media_type", a.media_type},
                           {"variants", std::move(variants)}});
  }
  const ArtistLibrary* lib = snapshot_->library(rec->library_slug);
  return ok({{"record", json_codec::to_json(*rec)},
             {"library", {{"slug", rec->library_slug}, {"artist_name", lib ? lib->artist_name : ""}}},
             {"oai_identifier", oai_.identifier(rec->record_id)},
             {"assets", std::move(assets_json)}});
}

Response Service::search(const Request& r) const {
  const auto q = param(r, "q");
  if (!q || textnorm::trim(*q).empty()) throw ApiError{ErrorCode::BadQuery, "missing query parameter q", nullptr};
  const std::string mode_text = param(r, "mode").value_or("simple");
  query::Mode mode;
  if (mode_text == "simple") mode = query::Mode::Simple;
  else if (mode_text == "advanced") mode = query::Mode::Advanced;
  else throw ApiError{ErrorCode::BadQuery, "mode must be simple or advanced", json{{"parameter", "mode"}}};
  const auto library = param(r, "library");
  if (library && !library->empty() && !snapshot_->library(*library)) {
    throw ApiError{ErrorCode::NotFound, "unknown library '" + *library + "'", nullptr};
  }
  const Page page = page_of(r);

  query::Node ast;
  try {
    ast = query::parse_query(*q, mode);
  } catch (const query::QueryError& e) {
    throw ApiError{ErrorCode::BadQuery, e.reason(), json{{"offset", e.offset()}, {"reason", e.reason()}}};
  }
  const auto hits = query::execute(*index_, ast);

  // Facet counts cover the whole result, before the library filter.
  std::map<std::string, int> by_library;
  std::map<std::string, int> by_mark;
  std::vector<const query::Hit*> shown;
  for (const auto& h : hits) {
    const BibRecord* rec = snapshot_->record(h.record_id);
    if (!rec) continue;
    ++by_library[rec->library_slug];
    std::set<std::string> kinds;
    for (const auto& m : rec->marks) kinds.insert(std::string(to_string(m.kind)));
    for (const auto& k : kinds) ++by_mark[k];
    if (!library || library->empty() || rec->library_slug == *library) shown.push_back(&h);
  }
  const auto [b, e] = page.bounds(shown);
  json results = json::array();
  for (std::size_t i = b; i < e; ++i) {
    json s = summary(*snapshot_->record(shown[i]->record_id));
    s["score"] = shown[i]->score;
    results.push_back(std::move(s));
  }
  json out = page.meta(shown.size());
  out["query"] = *q;
  out["mode"] = mode_text;
  out["canonical"] = query::to_query_string(ast);
  out["results"] = std::move(results);
  out["facets"] = {{"library", by_library}, {"marktype", by_mark}};
  return ok(std::move(out));
}

Response Service::compare(const Request& r) const {
  const auto libs = split_list(param(r, "libs").value_or(""));
  const auto level = comparison::parse_level(param(r, "level").value_or("work"));
  if (!level) throw ApiError{ErrorCode::BadQuery, "level must be work or edition", json{{"parameter", "level"}}};
  try {
    return ok(comparison::to_json(comparison::compare(*snapshot_, libs, *level)));
  } catch (const NotFoundError& e) {
    throw ApiError{ErrorCode::NotFound, e.what(), nullptr};
  } catch (const PreconditionError& e) {
    throw ApiError{ErrorCode::BadQuery, e.what(), json{{"parameter", "libs"}}};
  }
}

Response Service::authors(const Request& r) const {
  const auto libs = split_list(param(r, "libs").value_or(""));
  try {
    return ok({{"libraries", libs}, {"authors", comparison::to_json(comparison::author_frequency(*snapshot_, libs))}});
  } catch (const NotFoundError& e) {
    throw ApiError{ErrorCode::NotFound, e.what(), nullptr};
  } catch (const PreconditionError& e) {
    throw ApiError{ErrorCode::BadQuery, e.what(), json{{"parameter", "libs"}}};
  }
}

Response Service::map() const {
  Response r;
  r.content_type = std::string(geo::kMediaType);
  r.body = geo::export_geojson(snapshot_->libraries());
  return r;
}

Response Service::asset(const Request& r, const std::string& asset_id) const {
  const AssetRecord* a = snapshot_->asset(asset_id);
  if (!a) throw ApiError{ErrorCode::NotFound, "unknown asset '" + asset_id + "'", nullptr};
  const auto variant = assets::parse_variant(param(r, "variant").value_or("derivative"));
  if (!variant) {
    throw ApiError{ErrorCode::BadQuery, "variant must be original or derivative", json{{"parameter", "variant"}}};
  }
  const auto decision = assets::resolve_variant(*a, *variant);
  if (const auto* denied = std::get_if<assets::Denied>(&decision)) {
    throw ApiError{ErrorCode::AccessDenied, "this variant may not be served", json{{"reason", denied->reason}}};
  }
  const auto& allowed = std::get<assets::Allowed>(decision);
  Response out;
  out.content_type = a->media_type;
  try {
    out.body = read_file(snapshot_->root() / allowed.path);
  } catch (const std::exception&) {
    throw ApiError{ErrorCode::Internal, "asset file unavailable", nullptr};
  }
  return out;
}

Response Service::oai(const Request& r) const {
  oai::Params params(r.query.begin(), r.query.end());
  if (r.method == "POST") {
    for (auto& kv : parse_form(r.body)) params.insert(std::move(kv));
  }
  Response out;
  out.content_type = "text/xml; charset=utf-8";
  out.body = oai_.handle(params);
  return out;
}

std::unique_ptr<Service> open_service(const AppConfig& config, Clock clock) {
  auto snap = Snapshot::load(config.store_root);
  auto index = query::load_index(config.store_root, snap->fingerprint());
  return std::make_unique<Service>(snap, index, config.oai, std::move(clock));
}

}  // namespace alp::api
