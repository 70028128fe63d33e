// Same define as the provider transport: httplib.h must be configured
// identically in every translation unit.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "alp/api.hpp"

namespace alp::api {

bool serve(const Service& service, const AppConfig& config) {
  httplib::Server server;
  if (config.static_dir && !server.set_mount_point("/", config.static_dir->string())) return false;

  const auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    const auto q = req.target.find('?');
    if (q != std::string::npos) r.query = parse_form(std::string_view(req.target).substr(q + 1));
    r.body = req.body;
    r.content_type = req.get_header_value("Content-Type");
    const Response out = service.handle(r);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  // Static files are looked up before these routes.
  server.Get(".*", handler);
  server.Post(".*", handler);
  server.Put(".*", handler);
  server.Patch(".*", handler);
  server.Delete(".*", handler);
  return server.listen(config.host, config.port);
}

}  // namespace alp::api
