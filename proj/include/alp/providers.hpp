#pragma once

// Clients for digitization providers: an SRU 1.2 (XML) client and a REST
// (JSON) client behind one interface, with live, replay and recording
// transports.
//
// Replay fixtures live at <dir>/<provider>/<sha256 of "GET <url>">.resp. The
// first line of a .resp file is the HTTP status code, or the word "timeout"
// to simulate a network failure; the remaining bytes are the body.

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/catalog.hpp"
#include "alp/error.hpp"
#include "alp/matcher.hpp"

namespace alp::providers {

using matcher::ProviderRecord;

inline constexpr int kMaxResults = 50;

struct ProviderQuery {
  std::optional<std::string> title;
  std::optional<std::string> creator;
  // Not sent to providers, so that reissues come back as approximate candidates.
  std::optional<std::string> year;
  int max_results = 20;
};

// Title, creator and year of a catalog record.
ProviderQuery query_for(const BibRecord& record, int max_results = 20);

class ProviderError : public Error {
 public:
  using Error::Error;
};

// Connection failure or timeout, after retries are exhausted.
class NetworkError : public ProviderError {
 public:
  NetworkError(const std::string& message, int attempts)
      : ProviderError(message), attempts_(attempts) {}
  int attempts() const { return attempts_; }

 private:
  int attempts_;
};

class HttpStatusError : public ProviderError {
 public:
  explicit HttpStatusError(int status)
      : ProviderError("provider answered HTTP " + std::to_string(status)), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class MalformedResponseError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// Replay mode found no fixture for a request.
class FixtureMissingError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

// ---------------------------------------------------------------------------
// Transports

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Raised by a transport for a single failed attempt; retried by the client.
class TransportFailure : public Error {
 public:
  using Error::Error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
  // True when requests reach the network (rate limiting applies).
  virtual bool live() const { return false; }
};

class LiveTransport : public Transport {
 public:
  explicit LiveTransport(std::chrono::seconds timeout = std::chrono::seconds(20));
  HttpResponse get(const std::string& url) override;
  bool live() const override { return true; }

 private:
  std::chrono::seconds timeout_;
};

// Fixture file name for a request URL.
std::string fixture_name(std::string_view url);

class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(std::filesystem::path dir) : dir_(std::move(dir)) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::filesystem::path dir_;
};

// Forwards to `inner` and writes every response as a replay fixture.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::shared_ptr<Transport> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}
  HttpResponse get(const std::string& url) override;
  bool live() const override { return inner_->live(); }

 private:
  std::shared_ptr<Transport> inner_;
  std::filesystem::path dir_;
};

void write_fixture(const std::filesystem::path& dir, std::string_view url,
                   const HttpResponse& response);

// ---------------------------------------------------------------------------

using Sleeper = std::function<void(std::chrono::milliseconds)>;
void real_sleep(std::chrono::milliseconds d);

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{500};  // doubled after each failure
  Sleeper sleep = real_sleep;
};

// Spaces calls at least 1/rate seconds apart.
class RateLimiter {
 public:
  using Now = std::function<std::chrono::steady_clock::time_point()>;
  explicit RateLimiter(double per_second, Sleeper sleep = real_sleep,
                       Now now = std::chrono::steady_clock::now);
  void acquire();

 private:
  std::chrono::nanoseconds interval_;
  Sleeper sleep_;
  Now now_;
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> next_;
};

class ProviderClient {
 public:
  virtual ~ProviderClient() = default;
  virtual Provider provider() const = 0;
  // Throws PreconditionError for an invalid query and ProviderError
  // subclasses for provider failures.
  virtual std::vector<ProviderRecord> search(const ProviderQuery& query) = 0;
};

class HttpClientBase : public ProviderClient {
 public:
  HttpClientBase(std::string endpoint, std::shared_ptr<Transport> transport, RetryPolicy retry,
                 std::shared_ptr<RateLimiter> limiter);
  std::vector<ProviderRecord> search(const ProviderQuery& query) override;
  virtual std::string request_url(const ProviderQuery& query) const = 0;

 protected:
  virtual std::vector<ProviderRecord> parse(const std::string& body) const = 0;
  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string fetch(const std::string& url);

  std::string endpoint_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
  std::shared_ptr<RateLimiter> limiter_;
};

// SRU 1.2 searchRetrieve with recordSchema=dc.
class SruClient : public HttpClientBase {
 public:
  using HttpClientBase::HttpClientBase;
  Provider provider() const override { return Provider::GallicaLike; }
  std::string request_url(const ProviderQuery& query) const override;
  static std::string cql(const ProviderQuery& query);

 protected:
  std::vector<ProviderRecord> parse(const std::string& body) const override;
};

// GET <endpoint>?title=..&author=..&limit=N returning {"docs": [...]}.
class RestClient : public HttpClientBase {
 public:
  using HttpClientBase::HttpClientBase;
  Provider provider() const override { return Provider::OpenLibraryLike; }
  std::string request_url(const ProviderQuery& query) const override;

 protected:
  std::vector<ProviderRecord> parse(const std::string& body) const override;
};

// Serves a fixed candidate list; used for offline curation runs and tests.
class StaticClient : public ProviderClient {
 public:
  explicit StaticClient(std::vector<ProviderRecord> records, Provider provider = Provider::Fixture)
      : records_(std::move(records)), provider_(provider) {}
  Provider provider() const override { return provider_; }
  std::vector<ProviderRecord> search(const ProviderQuery& query) override;

 private:
  std::vector<ProviderRecord> records_;
  Provider provider_;
};

void check_query(const ProviderQuery& query);

}  // namespace alp::providers
