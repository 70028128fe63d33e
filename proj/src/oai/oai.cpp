#include "alp/oai.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <vector>

#include <json.hpp>

#include "alp/dc_metadata.hpp"
#include "alp/xml.hpp"

namespace alp::oai {

namespace {

constexpr std::string_view kMetadataPrefix = "oai_dc";
constexpr std::string_view kOaiDcSchema = "http://www.openarchives.org/OAI/2.0/oai_dc.xsd";
constexpr std::string_view kEpoch = "1970-01-01T00:00:00Z";

struct OaiError {
  std::string code;
  std::string message;
};

bool is_day(std::string_view s) {
  static const std::regex re(R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])$)");
  return std::regex_match(s.begin(), s.end(), re);
}

bool is_seconds(std::string_view s) {
  static const std::regex re(
      R"(^\d{4}-(0[1-9]|1[0-2])-(0[1-9]|[12]\d|3[01])T([01]\d|2[0-3]):[0-5]\d:[0-5]\dZ$)");
  return std::regex_match(s.begin(), s.end(), re);
}

bool is_token_chars(std::string_view s) {
  static const std::regex re(R"(^[A-Za-z0-9\-_\.!~\*'\(\)]+$)");
  return std::regex_match(s.begin(), s.end(), re);
}

std::string element(std::string_view name, std::string_view text) {
  return "<" + std::string(name) + ">" + xml::escape(text) + "</" + std::string(name) + ">";
}

std::optional<std::string> single(const Params& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

}  // namespace

struct Endpoint::Reply {
  std::vector<OaiError> errors;
  std::string body;
  // badVerb and badArgument replies must not echo the request arguments.
  bool echo_arguments = true;

  static Reply error(std::string code, std::string message) {
    Reply r;
    r.errors.push_back({std::move(code), std::move(message)});
    r.echo_arguments = !(r.errors.front().code == "badVerb" || r.errors.front().code == "badArgument");
    return r;
  }
};

// ---------------------------------------------------------------------------

std::string encode_token(const ResumptionToken& token) {
  nlohmann::json j;
  j["verb"] = token.verb;
  if (token.set_spec) j["set"] = *token.set_spec;
  if (token.from) j["from"] = *token.from;
  if (token.until) j["until"] = *token.until;
  j["prefix"] = token.metadata_prefix;
  j["offset"] = token.offset;
  j["snapshot"] = token.snapshot_id;
  return base64url_encode(j.dump());
}

std::optional<ResumptionToken> decode_token(std::string_view text) {
  const auto raw = base64url_decode(text);
  if (!raw) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(*raw);
    if (!j.is_object()) return std::nullopt;
    static const std::set<std::string> known = {"verb", "set", "from", "until", "prefix", "offset", "snapshot"};
    for (const auto& [k, v] : j.items()) {
      if (!known.count(k)) return std::nullopt;
      if (k == "offset" ? !v.is_number_unsigned() : !v.is_string()) return std::nullopt;
    }
    if (!j.contains("verb") || !j.contains("prefix") || !j.contains("offset") || !j.contains("snapshot")) {
      return std::nullopt;
    }
    ResumptionToken t;
    t.verb = j["verb"].get<std::string>();
    if (j.contains("set")) t.set_spec = j["set"].get<std::string>();
    if (j.contains("from")) t.from = j["from"].get<std::string>();
    if (j.contains("until")) t.until = j["until"].get<std::string>();
    t.metadata_prefix = j["prefix"].get<std::string>();
    t.offset = j["offset"].get<std::size_t>();
    t.snapshot_id = j["snapshot"].get<std::string>();
    if (encode_token(t) != text) return std::nullopt;
    return t;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------

Endpoint::Endpoint(std::shared_ptr<const Snapshot> snapshot, Config config, Clock clock)
    : snapshot_(std::move(snapshot)), config_(std::move(config)), clock_(std::move(clock)) {
  if (config_.page_size < 1) throw PreconditionError("oai page size must be at least 1");
}

std::string Endpoint::identifier(std::string_view record_id) const {
  return "oai:" + config_.repository_id + ":" + std::string(record_id);
}

std::optional<std::string> Endpoint::record_id(std::string_view identifier) const {
  const std::string prefix = "oai:" + config_.repository_id + ":";
  if (identifier.rfind(prefix, 0) != 0) return std::nullopt;
  std::string id(identifier.substr(prefix.size()));
  if (!snapshot_->record(id)) return std::nullopt;
  return id;
}

std::string Endpoint::handle(std::string_view verb, Params params) const {
  params.emplace("verb", std::string(verb));
  return handle(params);
}

std::string Endpoint::handle(const Params& params) const {
  const Reply reply = dispatch(params);

  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\" "
      "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
      "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/ "
      "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd\">\n";
  out += element("responseDate", clock_()) + "\n";
  out += "<request";
  if (reply.echo_arguments) {
    for (const auto& [k, v] : params) {
      // Values that would make the echo itself invalid are left out.
      if ((k == "metadataPrefix" || k == "set") && !is_token_chars(v)) continue;
      if ((k == "from" || k == "until") && !is_seconds(v) && !is_day(v)) continue;
      out += " " + k + "=\"" + xml::escape_attribute(v) + "\"";
    }
  }
  out += ">" + xml::escape(config_.base_url) + "</request>\n";
  if (reply.errors.empty()) {
    out += reply.body;
  } else {
    for (const auto& e : reply.errors) {
      out += "<error code=\"" + e.code + "\">" + xml::escape(e.message) + "</error>\n";
    }
  }
  out += "</OAI-PMH>\n";
  return out;
}

Endpoint::Reply Endpoint::dispatch(const Params& params) const {
  static const std::map<std::string, std::pair<std::set<std::string>, std::set<std::string>>> verbs = {
      // verb -> (required, optional) arguments
      {"Identify", {{}, {}}},
      {"ListMetadataFormats", {{}, {"identifier"}}},
      {"ListSets", {{}, {"resumptionToken"}}},
      {"GetRecord", {{"identifier", "metadataPrefix"}, {}}},
      {"ListIdentifiers", {{"metadataPrefix"}, {"from", "until", "set", "resumptionToken"}}},
      {"ListRecords", {{"metadataPrefix"}, {"from", "until", "set", "resumptionToken"}}},
  };

  if (params.count("verb") != 1) {
    return Reply::error("badVerb", params.count("verb") ? "verb argument is repeated" : "missing verb argument");
  }
  const std::string verb = params.find("verb")->second;
  auto spec = verbs.find(verb);
  if (spec == verbs.end()) return Reply::error("badVerb", "illegal verb '" + verb + "'");
  const auto& [required, optional] = spec->second;

  for (auto it = params.begin(); it != params.end(); it = params.upper_bound(it->first)) {
    if (it->first == "verb") continue;
    if (!required.count(it->first) && !optional.count(it->first)) {
      return Reply::error("badArgument", "illegal argument '" + it->first + "' for " + verb);
    }
    if (params.count(it->first) > 1) return Reply::error("badArgument", "argument '" + it->first + "' is repeated");
  }
  if (params.count("resumptionToken")) {
    if (params.size() != 2) return Reply::error("badArgument", "resumptionToken is an exclusive argument");
  } else {
    for (const auto& r : required) {
      if (!params.count(r)) return Reply::error("badArgument", "missing required argument '" + r + "'");
    }
  }

  if (verb == "Identify") return identify();
  if (verb == "ListMetadataFormats") return list_metadata_formats(params);
  if (verb == "ListSets") return list_sets(params);
  if (verb == "GetRecord") return get_record(params);
  return list(verb, params);
}

Endpoint::Reply Endpoint::identify() const {
  std::string earliest(kEpoch);
  if (!snapshot_->records().empty()) {
    earliest = std::min_element(snapshot_->records().begin(), snapshot_->records().end(),
                                [](const BibRecord& a, const BibRecord& b) { return a.datestamp < b.datestamp; })
                   ->datestamp;
  }
  Reply r;
  r.body = "<Identify>\n" + element("repositoryName", config_.repository_name) + "\n" +
           element("baseURL", config_.base_url) + "\n" + element("protocolVersion", "2.0") + "\n" +
           element("adminEmail", config_.admin_email) + "\n" + element("earliestDatestamp", earliest) +
           "\n" + element("deletedRecord", "no") + "\n" + element("granularity", "YYYY-MM-DDThh:mm:ssZ") +
           "\n</Identify>\n";
  return r;
}

Endpoint::Reply Endpoint::list_metadata_formats(const Params& params) const {
  if (auto id = single(params, "identifier"); id && !record_id(*id)) {
    return Reply::error("idDoesNotExist", "no record with identifier " + *id);
  }
  Reply r;
  r.body = "<ListMetadataFormats>\n<metadataFormat>\n" + element("metadataPrefix", kMetadataPrefix) + "\n" +
           element("schema", kOaiDcSchema) + "\n" + element("metadataNamespace", dc::kOaiDcNamespace) +
           "\n</metadataFormat>\n</ListMetadataFormats>\n";
  return r;
}

Endpoint::Reply Endpoint::list_sets(const Params& params) const {
  if (params.count("resumptionToken")) {
    return Reply::error("badResumptionToken", "ListSets is never split across responses");
  }
  Reply r;
  r.body = "<ListSets>\n";
  for (const auto& lib : snapshot_->libraries()) {
    r.body += "<set>" + element("setSpec", lib.slug) + element("setName", lib.artist_name) + "</set>\n";
  }
  r.body += "</ListSets>\n";
  return r;
}

std::string Endpoint::header_xml(const BibRecord& record) const {
  return "<header>" + element("identifier", identifier(record.record_id)) +
         element("datestamp", record.datestamp) + element("setSpec", record.library_slug) + "</header>";
}

std::string Endpoint::record_xml(const BibRecord& record) const {
  std::string out = "<record>" + header_xml(record) + "<metadata>" +
                    dc::to_oai_dc_xml(record, dc::QualifierPlacement::Omit) + "</metadata>";
  const std::string refinements = dc::refinements_xml(record.elements);
  if (!refinements.empty()) out += "<about>" + refinements + "</about>";
  return out + "</record>\n";
}

Endpoint::Reply Endpoint::get_record(const Params& params) const {
  const std::string id = *single(params, "identifier");
  const auto rid = record_id(id);
  if (!rid) return Reply::error("idDoesNotExist", "no record with identifier " + id);
  if (*single(params, "metadataPrefix") != kMetadataPrefix) {
    return Reply::error("cannotDisseminateFormat", "only oai_dc is supported");
  }
  Reply r;
  r.body = "<GetRecord>\n" + record_xml(*snapshot_->record(*rid)) + "</GetRecord>\n";
  return r;
}

Endpoint::Reply Endpoint::list(const std::string& verb, const Params& params) const {
  ResumptionToken state;
  if (auto raw = single(params, "resumptionToken")) {
    auto token = decode_token(*raw);
    if (!token || token->verb != verb) return Reply::error("badResumptionToken", "unrecognized resumption token");
    if (token->snapshot_id != snapshot_->fingerprint()) {
      return Reply::error("badResumptionToken", "resumption token refers to an older store snapshot");
    }
    state = *token;
  } else {
    state.verb = verb;
    state.metadata_prefix = *single(params, "metadataPrefix");
    state.set_spec = single(params, "set");
    state.from = single(params, "from");
    state.until = single(params, "until");
    state.snapshot_id = snapshot_->fingerprint();
    for (const auto* arg : {&state.from, &state.until}) {
      if (*arg && !is_day(**arg) && !is_seconds(**arg)) {
        return Reply::error("badArgument", "'" + **arg + "' is not a UTC date or datetime");
      }
    }
    if (state.from && state.until) {
      if (state.from->size() != state.until->size()) {
        return Reply::error("badArgument", "from and until have different granularities");
      }
      if (*state.from > *state.until) return Reply::error("badArgument", "from is later than until");
    }
    if (state.metadata_prefix != kMetadataPrefix) {
      return Reply::error("cannotDisseminateFormat", "only oai_dc is supported");
    }
  }

  const std::string from = !state.from ? "" : is_day(*state.from) ? *state.from + "T00:00:00Z" : *state.from;
  const std::string until =
      !state.until ? "" : is_day(*state.until) ? *state.until + "T23:59:59Z" : *state.until;
  std::vector<const BibRecord*> matching;
  for (const auto& rec : snapshot_->records()) {
    if (state.set_spec && rec.library_slug != *state.set_spec) continue;
    if (!from.empty() && rec.datestamp < from) continue;
    if (!until.empty() && rec.datestamp > until) continue;
    matching.push_back(&rec);
  }
  if (matching.empty()) return Reply::error("noRecordsMatch", "the combination of arguments yields no records");
  if (state.offset >= matching.size()) {
    return Reply::error("badResumptionToken", "resumption token is past the end of the list");
  }

  const std::size_t end = std::min(matching.size(), state.offset + static_cast<std::size_t>(config_.page_size));
  Reply r;
  r.body = "<" + verb + ">\n";
  for (std::size_t i = state.offset; i < end; ++i) {
    r.body += verb == "ListRecords" ? record_xml(*matching[i]) : header_xml(*matching[i]) + "\n";
  }
  if (state.offset > 0 || end < matching.size()) {
    const std::string attrs = " completeListSize=\"" + std::to_string(matching.size()) + "\" cursor=\"" +
                              std::to_string(state.offset) + "\"";
    if (end < matching.size()) {
      ResumptionToken next = state;
      next.offset = end;
      r.body += "<resumptionToken" + attrs + ">" + encode_token(next) + "</resumptionToken>\n";
    } else {
      r.body += "<resumptionToken" + attrs + "/>\n";
    }
  }
  r.body += "</" + verb + ">\n";
  return r;
}

}  // namespace alp::oai
