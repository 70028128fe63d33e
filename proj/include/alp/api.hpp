#pragma once

// Read-only HTTP API over an immutable snapshot. Service::handle is a pure
// function of the request; serve() puts it behind an HTTP listener.
//
// JSON bodies carry "schema_version": 1. Errors are
//   {"schema_version": 1, "error": {"code": "BadQuery", "message": "...", "detail": {...}}}
// with code one of BadQuery (400), NotFound (404), AccessDenied (403),
// Internal (500).

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "alp/config.hpp"
#include "alp/query.hpp"
#include "alp/store.hpp"

namespace alp::api {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kDefaultPerPage = 20;
inline constexpr int kMaxPerPage = 100;

enum class ErrorCode { BadQuery, NotFound, AccessDenied, Internal };
std::string_view to_string(ErrorCode code);
int http_status(ErrorCode code);

struct Request {
  std::string method = "GET";
  std::string path;
  std::multimap<std::string, std::string> query;  // decoded
  std::string body;
  std::string content_type;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;

  nlohmann::json json() const { return nlohmann::json::parse(body); }
};

// Decodes application/x-www-form-urlencoded text ('+' is a space).
std::multimap<std::string, std::string> parse_form(std::string_view text);
std::string percent_decode(std::string_view text);

class Service {
 public:
  Service(std::shared_ptr<const Snapshot> snapshot, std::shared_ptr<const query::SearchIndex> index,
          oai::Config oai_config, Clock clock = utc_now);

  Response handle(const Request& request) const;

  const Snapshot& snapshot() const { return *snapshot_; }

 private:
  Response libraries(const Request& r) const;
  Response library(const Request& r, const std::string& slug) const;
  Response record(const std::string& record_id) const;
  Response search(const Request& r) const;
  Response compare(const Request& r) const;
  Response authors(const Request& r) const;
  Response map() const;
  Response asset(const Request& r, const std::string& asset_id) const;
  Response oai(const Request& r) const;

  std::shared_ptr<const Snapshot> snapshot_;
  std::shared_ptr<const query::SearchIndex> index_;
  oai::Endpoint oai_;
};

// Loads the snapshot and the persisted index (rebuilt in memory when missing
// or stale). Throws StoreCorruptError.
std::unique_ptr<Service> open_service(const AppConfig& config, Clock clock = utc_now);

// Blocks serving `service` on config.host:config.port. Returns false when
// the listener cannot bind.
bool serve(const Service& service, const AppConfig& config);

}  // namespace alp::api
