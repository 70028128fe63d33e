#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "alp/providers.hpp"

namespace alp::providers {

LiveTransport::LiveTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse LiveTransport::get(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw PreconditionError("not an absolute URL: " + url);
  const auto path = url.find('/', scheme + 3);
  const std::string origin = url.substr(0, path);
  const std::string target = path == std::string::npos ? "/" : url.substr(path);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto res = client.Get(target, {{"User-Agent", "alp/1.0 (artists' libraries catalog)"}});
  if (!res) throw TransportFailure("GET " + url + ": " + httplib::to_string(res.error()));
  return HttpResponse{res->status, res->body};
}

}  // namespace alp::providers
