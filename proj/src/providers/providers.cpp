#include "alp/providers.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "alp/dc_metadata.hpp"
#include "alp/textnorm.hpp"
#include "alp/util.hpp"
#include "alp/xml.hpp"

namespace alp::providers {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSruNamespace = "http://www.loc.gov/zing/srw/";

std::optional<std::string> non_blank(const std::optional<std::string>& v) {
  if (!v || textnorm::trim(*v).empty()) return std::nullopt;
  return textnorm::trim(*v);
}

std::string cql_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool is_http_url(std::string_view s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

// "https://host:8080/a/b?x" -> "https://host:8080"
std::string origin_of(std::string_view url) {
  const auto scheme = url.find("://");
  if (scheme == std::string_view::npos) return std::string(url);
  const auto path = url.find('/', scheme + 3);
  return std::string(url.substr(0, path));
}

std::string append_query(const std::string& endpoint, const std::string& query) {
  return endpoint + (endpoint.find('?') == std::string::npos ? "?" : "&") + query;
}

std::optional<std::string> json_string(const nlohmann::json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_array() && !it->empty()) {
    const auto& first = it->front();
    if (first.is_string()) return first.get<std::string>();
    if (first.is_number_integer()) return std::to_string(first.get<long long>());
  }
  return std::nullopt;
}

}  // namespace

ProviderQuery query_for(const BibRecord& record, int max_results) {
  ProviderQuery q;
  q.title = non_blank(record.first("title"));
  q.creator = non_blank(record.first("creator"));
  q.year = non_blank(record.first("date"));
  q.max_results = max_results;
  return q;
}

void check_query(const ProviderQuery& query) {
  if (!non_blank(query.title) && !non_blank(query.creator)) {
    throw PreconditionError("provider query needs a title or a creator");
  }
  if (query.max_results < 1 || query.max_results > kMaxResults) {
    throw PreconditionError("max_results must be between 1 and " + std::to_string(kMaxResults));
  }
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

// ---------------------------------------------------------------------------

std::string fixture_name(std::string_view url) {
  return sha256_hex("GET " + std::string(url)) + ".resp";
}

HttpResponse ReplayTransport::get(const std::string& url) {
  const fs::path path = dir_ / fixture_name(url);
  std::error_code ec;
  if (!fs::exists(path, ec)) throw FixtureMissingError("no replay fixture for GET " + url);
  const std::string content = read_file(path);
  const auto nl = content.find('\n');
  const std::string head = textnorm::trim(content.substr(0, nl));
  if (head == "timeout") throw TransportFailure("simulated timeout for GET " + url);
  HttpResponse r;
  try {
    r.status = std::stoi(head);
  } catch (const std::exception&) {
    throw FixtureMissingError("unreadable replay fixture " + path.string());
  }
  r.body = nl == std::string::npos ? "" : content.substr(nl + 1);
  return r;
}

void write_fixture(const fs::path& dir, std::string_view url, const HttpResponse& response) {
  fs::create_directories(dir);
  write_file_atomic(dir / fixture_name(url), std::to_string(response.status) + "\n" + response.body);
}

HttpResponse RecordingTransport::get(const std::string& url) {
  try {
    HttpResponse r = inner_->get(url);
    write_fixture(dir_, url, r);
    return r;
  } catch (const TransportFailure&) {
    fs::create_directories(dir_);
    write_file_atomic(dir_ / fixture_name(url), "timeout\n");
    throw;
  }
}

// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(double per_second, Sleeper sleep, Now now)
    : interval_(per_second > 0 ? std::chrono::nanoseconds(static_cast<long long>(1e9 / per_second))
                               : std::chrono::nanoseconds(0)),
      sleep_(std::move(sleep)),
      now_(std::move(now)) {}

void RateLimiter::acquire() {
  std::lock_guard lock(mutex_);
  auto now = now_();
  if (next_ && *next_ > now) {
    sleep_(std::chrono::ceil<std::chrono::milliseconds>(*next_ - now));
    now = *next_;
  }
  next_ = now + interval_;
}

// ---------------------------------------------------------------------------

HttpClientBase::HttpClientBase(std::string endpoint, std::shared_ptr<Transport> transport,
                               RetryPolicy retry, std::shared_ptr<RateLimiter> limiter)
    : endpoint_(std::move(endpoint)),
      transport_(std::move(transport)),
      retry_(std::move(retry)),
      limiter_(std::move(limiter)) {}

std::string HttpClientBase::fetch(const std::string& url) {
  auto backoff = retry_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= retry_.attempts; ++attempt) {
    if (limiter_ && transport_->live()) limiter_->acquire();
    try {
      HttpResponse r = transport_->get(url);
      if (r.status != 200) throw HttpStatusError(r.status);
      return std::move(r.body);
    } catch (const TransportFailure& e) {
      last_error = e.what();
      if (attempt < retry_.attempts) {
        retry_.sleep(backoff);
        backoff *= 2;
      }
    }
  }
  throw NetworkError(last_error + " (" + std::to_string(retry_.attempts) + " attempts)",
                     retry_.attempts);
}

std::vector<ProviderRecord> HttpClientBase::search(const ProviderQuery& query) {
  check_query(query);
  auto records = parse(fetch(request_url(query)));
  if (records.size() > static_cast<std::size_t>(query.max_results)) {
    records.resize(static_cast<std::size_t>(query.max_results));
  }
  return records;
}

// ---------------------------------------------------------------------------

std::string SruClient::cql(const ProviderQuery& query) {
  std::vector<std::string> clauses;
  if (auto t = non_blank(query.title)) clauses.push_back("dc.title all " + cql_quote(*t));
  if (auto c = non_blank(query.creator)) clauses.push_back("dc.creator all " + cql_quote(*c));
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i) out += " and ";
    out += clauses[i];
  }
  return out;
}

std::string SruClient::request_url(const ProviderQuery& query) const {
  return append_query(endpoint(), "operation=searchRetrieve&version=1.2&recordSchema=dc"
                                  "&maximumRecords=" +
                                      std::to_string(query.max_results) +
                                      "&query=" + percent_encode(cql(query)));
}

std::vector<ProviderRecord> SruClient::parse(const std::string& body) const {
  xml::Node root;
  try {
    root = xml::parse(body);
  } catch (const xml::XmlError& e) {
    throw MalformedResponseError(std::string("SRU response: ") + e.what());
  }
  if (root.name.ns != kSruNamespace || root.name.local != "searchRetrieveResponse") {
    throw MalformedResponseError("SRU response: unexpected root element " + root.name.local);
  }
  if (const xml::Node* diag = root.child("diagnostics")) {
    throw MalformedResponseError("SRU diagnostic: " + textnorm::trim(diag->deep_text()));
  }
  std::vector<ProviderRecord> out;
  const xml::Node* records = root.child("records");
  if (!records) return out;
  for (const xml::Node* rec : records->children_named("record")) {
    const xml::Node* data = rec->child("recordData");
    if (!data || data->children.empty()) continue;
    ProviderRecord p;
    p.provider = Provider::GallicaLike;
    std::vector<std::string> identifiers;
    for (const xml::Node& el : data->children.front().children) {
      if (el.name.ns != dc::kDcNamespace) continue;
      std::string value = textnorm::trim(el.deep_text());
      if (value.empty()) continue;
      const std::string& n = el.name.local;
      if (n == "title" && !p.title) p.title = value;
      else if (n == "creator" && !p.creator) p.creator = value;
      else if (n == "date" && !p.date) p.date = value;
      else if (n == "publisher" && !p.publisher) p.publisher = value;
      else if (n == "identifier") identifiers.push_back(std::move(value));
    }
    for (const auto& id : identifiers) {
      if (is_http_url(id)) {
        p.access_url = id;
        break;
      }
    }
    if (const xml::Node* rid = rec->child("recordIdentifier")) {
      p.provider_record_id = textnorm::trim(rid->deep_text());
    }
    if (p.provider_record_id.empty() && !identifiers.empty()) p.provider_record_id = identifiers.front();
    // A record nobody can open is useless as a surrogate.
    if (p.access_url.empty() || p.provider_record_id.empty()) continue;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string RestClient::request_url(const ProviderQuery& query) const {
  std::string q;
  if (auto t = non_blank(query.title)) q += "title=" + percent_encode(*t) + "&";
  if (auto c = non_blank(query.creator)) q += "author=" + percent_encode(*c) + "&";
  q += "limit=" + std::to_string(query.max_results);
  return append_query(endpoint(), q);
}

std::vector<ProviderRecord> RestClient::parse(const std::string& body) const {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("REST response: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("docs") || !doc["docs"].is_array()) {
    throw MalformedResponseError("REST response: missing docs array");
  }
  std::vector<ProviderRecord> out;
  const std::string origin = origin_of(endpoint());
  for (const auto& d : doc["docs"]) {
    if (!d.is_object()) throw MalformedResponseError("REST response: doc is not an object");
    const auto key = json_string(d, "key");
    if (!key || key->empty()) continue;
    ProviderRecord p;
    p.provider = Provider::OpenLibraryLike;
    p.provider_record_id = key->substr(key->rfind('/') + 1);
    p.title = non_blank(json_string(d, "title"));
    p.creator = non_blank(json_string(d, "author_name"));
    p.date = non_blank(json_string(d, "publish_year"));
    if (!p.date) p.date = non_blank(json_string(d, "first_publish_year"));
    p.publisher = non_blank(json_string(d, "publisher"));
    const auto url = json_string(d, "url");
    p.access_url = url && is_http_url(*url) ? *url : origin + ((*key)[0] == '/' ? "" : "/") + *key;
    if (p.provider_record_id.empty()) continue;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ProviderRecord> StaticClient::search(const ProviderQuery& query) {
  check_query(query);
  const auto want = textnorm::token_set(non_blank(query.title).value_or("") + " " +
                                        non_blank(query.creator).value_or(""));
  std::vector<ProviderRecord> out;
  for (const auto& r : records_) {
    const auto have = textnorm::token_set(r.title.value_or("") + " " + r.creator.value_or(""));
    if (textnorm::jaccard(want, have) > 0.0) out.push_back(r);
    if (out.size() == static_cast<std::size_t>(query.max_results)) break;
  }
  return out;
}

}  // namespace alp::providers
