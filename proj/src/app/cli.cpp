#include "alp/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "alp/api.hpp"
#include "alp/assets.hpp"
#include "alp/comparison.hpp"
#include "alp/dc_metadata.hpp"
#include "alp/geo.hpp"
#include "alp/json_codec.hpp"
#include "alp/matcher.hpp"
#include "alp/query.hpp"
#include "alp/textnorm.hpp"

namespace alp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

IngestSummary ingest_csv(StoreWriter& writer, std::string_view csv, const fs::path& report_path) {
  const dc::IngestParse parsed = dc::parse_ingest_csv(csv);
  const auto known = writer.library_slugs();

  IngestSummary summary;
  std::vector<dc::RowError> rejections = parsed.errors;
  std::map<std::string, int> next_seq;
  std::map<std::string, std::vector<BibRecord>> accepted;
  for (const auto& row : parsed.rows) {
    if (!known.contains(row.library_slug)) {
      rejections.push_back({row.line, "unknown library '" + row.library_slug + "'"});
      continue;
    }
    auto seq = next_seq.find(row.library_slug);
    if (seq == next_seq.end()) seq = next_seq.emplace(row.library_slug, writer.max_sequence(row.library_slug)).first;
    BibRecord rec;
    try {
      rec = dc::to_record(row, assign_id(row.library_slug, seq->second));
    } catch (const SequenceOverflowError& e) {
      rejections.push_back({row.line, e.what()});
      continue;
    }
    const auto violations = validate_record(rec, known);
    if (!violations.empty()) {
      std::string reason;
      for (const auto& v : violations) reason += (reason.empty() ? "" : "; ") + v.field + ": " + v.rule;
      rejections.push_back({row.line, reason});
      continue;
    }
    ++seq->second;
    summary.record_ids.push_back(rec.record_id);
    accepted[row.library_slug].push_back(std::move(rec));
  }
  for (const auto& [slug, records] : accepted) writer.write(slug, records);

  std::sort(rejections.begin(), rejections.end(), [](const auto& a, const auto& b) { return a.line < b.line; });
  std::string report(kIngestReportHeader);
  report += "\n";
  for (const auto& r : rejections) report += dc::csv_line({std::to_string(r.line), r.reason});
  write_file_atomic(report_path, report);

  summary.accepted = static_cast<int>(summary.record_ids.size());
  summary.rejected = static_cast<int>(rejections.size());
  summary.rows = summary.accepted + summary.rejected;
  summary.report_path = report_path;
  return summary;
}

MatchSummary match_library(StoreWriter& writer, std::string_view slug,
                           const std::vector<std::unique_ptr<providers::ProviderClient>>& clients,
                           int max_results, std::ostream& csv) {
  if (!writer.library_slugs().contains(std::string(slug))) {
    throw NotFoundError("unknown library '" + std::string(slug) + "'");
  }
  MatchSummary s;
  csv << matcher::kReportCsvHeader << "\n";
  std::vector<BibRecord> changed;
  for (const auto& rec : writer.read(slug)) {
    ++s.records;
    if (!rec.surrogates.empty()) {
      ++s.skipped;
      continue;
    }
    const auto query = providers::query_for(rec, max_results);
    std::vector<matcher::ProviderRecord> candidates;
    int failed = 0;
    for (const auto& client : clients) {
      try {
        auto found = client->search(query);
        candidates.insert(candidates.end(), found.begin(), found.end());
      } catch (const providers::ProviderError&) {
        ++failed;
        csv << matcher::provider_error_csv_row(rec.record_id, client->provider());
      }
    }
    if (failed > 0) ++s.provider_errors;
    if (failed == static_cast<int>(clients.size()) && !clients.empty()) continue;

    const auto report = matcher::classify(rec, std::move(candidates));
    csv << matcher::report_csv_row(rec.record_id, report);
    switch (report.verdict) {
      case matcher::Verdict::ExactEdition: ++s.exact; break;
      case matcher::Verdict::ApproximateEdition: ++s.approximate; break;
      case matcher::Verdict::NoMatch: ++s.no_match; break;
    }
    if (report.verdict != matcher::Verdict::NoMatch) {
      auto updated = matcher::attach_surrogate(rec, report);
      if (updated.surrogates.size() != rec.surrogates.size()) {
        ++s.attached;
        changed.push_back(std::move(updated));
      }
    }
  }
  if (!changed.empty()) writer.write(slug, changed);
  return s;
}

namespace {

std::vector<matcher::ProviderRecord> load_static_candidates(const fs::path& file) {
  const json j = json::parse(read_file(file));
  if (!j.is_array()) throw ConfigError("providers.static_candidates must hold a JSON array");
  std::vector<matcher::ProviderRecord> out;
  auto opt = [](const json& o, const char* key) -> std::optional<std::string> {
    if (!o.contains(key) || o[key].is_null()) return std::nullopt;
    return o[key].get<std::string>();
  };
  for (const auto& c : j) {
    matcher::ProviderRecord p;
    p.provider = Provider::Fixture;
    p.provider_record_id = c.at("id").get<std::string>();
    p.title = opt(c, "title");
    p.creator = opt(c, "creator");
    p.date = opt(c, "date");
    p.publisher = opt(c, "publisher");
    p.access_url = c.at("url").get<std::string>();
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<std::unique_ptr<providers::ProviderClient>> make_clients(const ProviderSettings& settings,
                                                                     providers::Sleeper sleep) {
  using namespace providers;
  std::vector<std::unique_ptr<ProviderClient>> out;
  const RetryPolicy retry{3, std::chrono::milliseconds(500), sleep};
  for (const auto& name : settings.enabled) {
    const auto provider = parse_provider(name);
    if (!provider) throw ConfigError("unknown provider '" + name + "'");
    if (*provider == Provider::Fixture) {
      if (!settings.static_candidates) throw ConfigError("the fixture provider needs providers.static_candidates");
      out.push_back(std::make_unique<StaticClient>(load_static_candidates(*settings.static_candidates)));
      continue;
    }
    std::shared_ptr<Transport> transport;
    const fs::path dir = settings.fixtures_dir / name;
    const auto live = [&] { return std::make_shared<LiveTransport>(std::chrono::seconds(settings.timeout_seconds)); };
    if (settings.mode == "live") transport = live();
    else if (settings.mode == "record") transport = std::make_shared<RecordingTransport>(live(), dir);
    else transport = std::make_shared<ReplayTransport>(dir);
    auto limiter = std::make_shared<RateLimiter>(settings.rate_per_second, sleep);
    if (*provider == Provider::GallicaLike) {
      out.push_back(std::make_unique<SruClient>(settings.sru_endpoint, transport, retry, limiter));
    } else {
      out.push_back(std::make_unique<RestClient>(settings.rest_endpoint, transport, retry, limiter));
    }
  }
  return out;
}

json to_json(const IngestSummary& s) {
  return {{"rows", s.rows},
          {"accepted", s.accepted},
          {"rejected", s.rejected},
          {"report_path", s.report_path.string()}};
}

json to_json(const MatchSummary& s) {
  return {{"records", s.records},         {"skipped", s.skipped},   {"exact_edition", s.exact},
          {"approximate_edition", s.approximate}, {"no_match", s.no_match}, {"provider_errors", s.provider_errors},
          {"attached", s.attached}};
}

// ---------------------------------------------------------------------------

namespace {

struct Options {
  std::string config_file;
  std::string store;

  std::string csv;
  std::string report;
  std::string validate_csv;

  std::vector<std::string> query_words;
  std::string mode = "simple";
  std::string library;
  int limit = 20;
  bool json_output = false;

  std::vector<std::string> slugs;
  std::string level = "work";

  std::string slug;
  std::string provider_mode;

  double lat = 0;
  double lon = 0;
  std::string site;
  std::string provenance;

  std::string artist;
  std::optional<int> born;
  std::optional<int> died;
  std::string description;

  std::string record_id;
  std::string kind;
  std::string rights;
  std::string original;
  std::string derivative;
  std::optional<std::size_t> mark;

  std::string host;
  std::optional<int> port;
};

std::shared_ptr<const query::SearchIndex> index_for(const Snapshot& snap, std::ostream& err) {
  if (auto idx = query::load_index(snap.root(), snap.fingerprint())) return idx;
  err << "note: search index is missing or stale; building it in memory (run 'alp index' to persist)\n";
  return query::SearchIndex::build(snap.records());
}

template <class E>
std::optional<E> parse_enum(const std::string& text, std::optional<E> (*parse)(std::string_view), const char* what) {
  auto v = parse(text);
  if (!v) throw PreconditionError(std::string("unknown ") + what + " '" + text + "'");
  return v;
}

int cmd_ingest(const AppConfig& cfg, const Options& o, std::ostream& out) {
  StoreWriter writer(cfg.store_root);
  const fs::path report = o.report.empty() ? fs::path(o.csv + ".report.csv") : fs::path(o.report);
  const auto s = ingest_csv(writer, read_file(o.csv), report);
  out << to_json(s).dump() << "\n";
  return s.rejected > 0 ? kExitPartial : kExitOk;
}

int cmd_validate(const AppConfig& cfg, const Options& o, std::ostream& out) {
  if (!o.validate_csv.empty()) {
    const auto parsed = dc::parse_ingest_csv(read_file(o.validate_csv));
    for (const auto& e : parsed.errors) out << o.validate_csv << ":" << e.line << ": " << e.reason << "\n";
    out << json{{"rows", parsed.rows.size() + parsed.errors.size()}, {"valid", parsed.rows.size()},
                {"invalid", parsed.errors.size()}}
               .dump()
        << "\n";
    return parsed.errors.empty() ? kExitOk : kExitPartial;
  }
  try {
    const auto snap = Snapshot::load(cfg.store_root);
    out << json{{"libraries", snap->libraries().size()}, {"records", snap->records().size()},
                {"assets", snap->assets().size()}, {"fingerprint", snap->fingerprint()}}
               .dump()
        << "\n";
    return kExitOk;
  } catch (const StoreCorruptError& e) {
    for (const auto& p : e.problems()) out << p << "\n";
    return kExitPartial;
  }
}

int cmd_index(const AppConfig& cfg, std::ostream& out) {
  const auto snap = Snapshot::load(cfg.store_root);
  WriterLock lock(cfg.store_root);
  const auto start = std::chrono::steady_clock::now();
  const auto idx = query::SearchIndex::build(snap->records());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  query::save_index(cfg.store_root, *idx, snap->fingerprint());
  out << json{{"records", idx->size()}, {"build_seconds", seconds}, {"path", query::index_path(cfg.store_root).string()}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_search(const AppConfig& cfg, const Options& o, std::ostream& out, std::ostream& err) {
  const auto snap = Snapshot::load(cfg.store_root);
  std::string text;
  for (const auto& w : o.query_words) text += (text.empty() ? "" : " ") + w;
  api::Service service(snap, index_for(*snap, err), cfg.oai);
  api::Request req;
  req.path = "/api/search";
  req.query = {{"q", text}, {"mode", o.mode}, {"per_page", std::to_string(o.limit)}};
  if (!o.library.empty()) req.query.emplace("library", o.library);
  const auto res = service.handle(req);
  const auto body = res.json();
  if (res.status != 200) {
    err << "error: " << body["error"]["message"].get<std::string>();
    if (body["error"].contains("detail") && body["error"]["detail"].contains("offset")) {
      err << " (at byte " << body["error"]["detail"]["offset"] << ")";
    }
    err << "\n";
    return kExitFatal;
  }
  if (o.json_output) {
    out << body.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& r : body["results"]) {
    out << r["score"].get<int>() << "\t" << r["record_id"].get<std::string>() << "\t"
        << r["title"].get<std::string>() << "\n";
  }
  err << body["total"].get<std::size_t>() << " result(s)\n";
  return kExitOk;
}

int cmd_compare(const AppConfig& cfg, const Options& o, std::ostream& out) {
  const auto snap = Snapshot::load(cfg.store_root);
  const auto level = comparison::parse_level(o.level);
  if (!level) throw PreconditionError("level must be work or edition");
  out << comparison::to_json(comparison::compare(*snap, o.slugs, *level)).dump(2) << "\n";
  return kExitOk;
}

int cmd_match(AppConfig cfg, const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.provider_mode.empty()) cfg.providers.mode = o.provider_mode;
  const auto clients = make_clients(cfg.providers);
  StoreWriter writer(cfg.store_root);
  MatchSummary s;
  if (o.report.empty()) {
    s = match_library(writer, o.slug, clients, cfg.providers.max_results, out);
  } else {
    std::ofstream csv(o.report, std::ios::binary);
    if (!csv) throw StoreError("cannot write " + o.report);
    s = match_library(writer, o.slug, clients, cfg.providers.max_results, csv);
  }
  err << to_json(s).dump() << "\n";
  return s.provider_errors > 0 ? kExitPartial : kExitOk;
}

int cmd_geo_set(const AppConfig& cfg, const Options& o, std::ostream& out) {
  StoreWriter writer(cfg.store_root);
  geo::Location loc{o.lat, o.lon, std::nullopt, std::nullopt};
  if (!o.site.empty()) loc.site = o.site;
  if (!o.provenance.empty()) loc.provenance = parse_enum<Provenance>(o.provenance, parse_provenance, "provenance");
  out << json_codec::to_json(geo::set_location(writer, o.slug, loc)).dump() << "\n";
  return kExitOk;
}

int cmd_library_add(const AppConfig& cfg, const Options& o, std::ostream& out) {
  StoreWriter writer(cfg.store_root);
  ArtistLibrary lib;
  lib.slug = o.slug;
  lib.artist_name = o.artist;
  lib.provenance = *parse_enum<Provenance>(o.provenance, parse_provenance, "provenance");
  lib.holding_site = o.site;
  lib.birth_year = o.born;
  lib.death_year = o.died;
  lib.description = o.description;
  for (const auto& existing : writer.libraries()) {
    if (existing.slug == lib.slug) {
      lib.latitude = existing.latitude;
      lib.longitude = existing.longitude;
    }
  }
  writer.put_library(lib);
  out << json_codec::to_json(lib).dump() << "\n";
  return kExitOk;
}

int cmd_asset_register(const AppConfig& cfg, const Options& o, std::ostream& out) {
  StoreWriter writer(cfg.store_root);
  assets::Registration reg;
  reg.record_id = o.record_id;
  reg.kind = *parse_enum<AssetKind>(o.kind, parse_asset_kind, "asset kind");
  reg.rights = *parse_enum<Rights>(o.rights, parse_rights, "rights value");
  reg.original = o.original;
  if (!o.derivative.empty()) reg.derivative = fs::path(o.derivative);
  reg.mark = o.mark;
  const auto a = assets::register_asset(writer, reg);
  out << json{{"asset_id", a.asset_id}, {"record_id", a.record_id}, {"rights", to_string(a.rights)},
              {"media_type", a.media_type}, {"has_derivative", a.derivative.has_value()}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_serve(AppConfig cfg, const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.host.empty()) cfg.host = o.host;
  if (o.port) cfg.port = *o.port;
  std::unique_ptr<api::Service> service;
  try {
    service = api::open_service(cfg);
  } catch (const StoreCorruptError& e) {
    err << "store does not validate:\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kExitFatal;
  }
  out << "serving " << service->snapshot().records().size() << " records on http://" << cfg.host << ":" << cfg.port
      << "\n"
      << std::flush;
  if (!api::serve(*service, cfg)) {
    err << "cannot listen on " << cfg.host << ":" << cfg.port << "\n";
    return kExitFatal;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Getenv& getenv) {
  CLI::App app{"Artists' libraries catalog: curation and serving", "alp"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_file, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--store", o.store, "store root (overrides store_root)");

  auto* ingest = app.add_subcommand("ingest", "ingest a catalog CSV");
  ingest->add_option("csv", o.csv, "CSV file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--report", o.report, "rejection report path (default <csv>.report.csv)");

  auto* validate = app.add_subcommand("validate", "validate the store, or a CSV without ingesting it");
  validate->add_option("--csv", o.validate_csv, "CSV file to check")->check(CLI::ExistingFile);

  auto* index = app.add_subcommand("index", "build and persist the search index");

  auto* search = app.add_subcommand("search", "run a query");
  search->add_option("query", o.query_words, "query text")->required();
  search->add_option("--mode", o.mode, "simple or advanced")->check(CLI::IsMember({"simple", "advanced"}));
  search->add_option("--library", o.library, "restrict to one library");
  search->add_option("--limit", o.limit, "maximum results")->check(CLI::Range(1, 100));
  search->add_flag("--json", o.json_output, "print the API payload");

  auto* compare = app.add_subcommand("compare", "compare libraries");
  compare->add_option("slugs", o.slugs, "library slugs")->required()->expected(2, -1);
  compare->add_option("--level", o.level, "work or edition")->check(CLI::IsMember({"work", "edition"}));

  auto* match = app.add_subcommand("match", "look for digitized copies of a library's records");
  match->add_option("slug", o.slug, "library slug")->required();
  match->add_option("--report", o.report, "review CSV path (default stdout)");
  match->add_option("--providers-mode", o.provider_mode, "live, replay or record")
      ->check(CLI::IsMember({"live", "replay", "record"}));

  auto* geo_cmd = app.add_subcommand("geo", "library locations");
  geo_cmd->require_subcommand(1);
  auto* geo_set = geo_cmd->add_subcommand("set", "set where a library is kept");
  geo_set->add_option("slug", o.slug, "library slug")->required();
  geo_set->add_option("--lat", o.lat, "latitude")->required();
  geo_set->add_option("--lon", o.lon, "longitude")->required();
  geo_set->add_option("--site", o.site, "holding site name");
  geo_set->add_option("--provenance", o.provenance, "material_fonds, reconstituted, inventory or sales_catalog");

  auto* library_cmd = app.add_subcommand("library", "library registry");
  library_cmd->require_subcommand(1);
  auto* library_add = library_cmd->add_subcommand("add", "create or update a library");
  library_add->add_option("slug", o.slug, "library slug")->required();
  library_add->add_option("--artist", o.artist, "artist name")->required();
  library_add->add_option("--provenance", o.provenance, "provenance type")->required();
  library_add->add_option("--site", o.site, "holding site name");
  library_add->add_option("--born", o.born, "birth year");
  library_add->add_option("--died", o.died, "death year");
  library_add->add_option("--description", o.description, "free text");

  auto* asset_cmd = app.add_subcommand("asset", "mark photographs");
  asset_cmd->require_subcommand(1);
  auto* asset_register = asset_cmd->add_subcommand("register", "register a photograph");
  asset_register->add_option("record_id", o.record_id, "owning record")->required();
  asset_register->add_option("--kind", o.kind, "dedication_photo, annotation_photo or other_mark_photo")->required();
  asset_register->add_option("--rights", o.rights, "public_domain, in_copyright or unknown")->required();
  asset_register->add_option("--original", o.original, "original image file")->required();
  asset_register->add_option("--derivative", o.derivative, "reduced image file");
  asset_register->add_option("--mark", o.mark, "index of the reading mark shown");

  auto* serve = app.add_subcommand("serve", "serve the read-only HTTP API");
  serve->add_option("--host", o.host, "listen address");
  serve->add_option("--port", o.port, "listen port")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitFatal;
  }

  try {
    AppConfig cfg = load_config(o.config_file.empty() ? std::nullopt : std::optional<fs::path>(o.config_file), getenv);
    if (!o.store.empty()) cfg.store_root = o.store;

    if (*ingest) return cmd_ingest(cfg, o, out);
    if (*validate) return cmd_validate(cfg, o, out);
    if (*index) return cmd_index(cfg, out);
    if (*search) return cmd_search(cfg, o, out, err);
    if (*compare) return cmd_compare(cfg, o, out);
    if (*match) return cmd_match(cfg, o, out, err);
    if (*geo_set) return cmd_geo_set(cfg, o, out);
    if (*library_add) return cmd_library_add(cfg, o, out);
    if (*asset_register) return cmd_asset_register(cfg, o, out);
    if (*serve) return cmd_serve(cfg, o, out, err);
  } catch (const StoreCorruptError& e) {
    err << "error: store does not validate\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}

}  // namespace alp::cli
