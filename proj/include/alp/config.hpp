#pragma once

// Service and CLI configuration: a JSON file whose keys are listed in
// kConfigKeys, each overridable by an environment variable named ALP_ plus
// the key upper-cased with dots as underscores (oai.page_size ->
// ALP_OAI_PAGE_SIZE).

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/error.hpp"
#include "alp/oai.hpp"

namespace alp {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ProviderSettings {
  std::string mode = "replay";  // live | replay | record
  std::filesystem::path fixtures_dir = "fixtures/providers";
  std::vector<std::string> enabled = {"gallica_like", "open_library_like"};
  std::string sru_endpoint = "https://gallica.bnf.fr/SRU";
  std::string rest_endpoint = "https://openlibrary.org/search.json";
  double rate_per_second = 1.0;
  int max_results = 20;
  int timeout_seconds = 20;
  // JSON array of candidates served by the "fixture" provider.
  std::optional<std::filesystem::path> static_candidates;
};

struct AppConfig {
  std::filesystem::path store_root = "data";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  oai::Config oai;
  ProviderSettings providers;
};

inline constexpr std::array<std::string_view, 18> kConfigKeys = {
    "store_root",
    "server.host",
    "server.port",
    "server.static_dir",
    "oai.repository_id",
    "oai.repository_name",
    "oai.base_url",
    "oai.admin_email",
    "oai.page_size",
    "providers.mode",
    "providers.fixtures_dir",
    "providers.enabled",
    "providers.sru_endpoint",
    "providers.rest_endpoint",
    "providers.rate_per_second",
    "providers.max_results",
    "providers.timeout_seconds",
    "providers.static_candidates",
};

// "ALP_OAI_PAGE_SIZE" for "oai.page_size".
std::string env_name(std::string_view key);

using Getenv = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> system_getenv(const std::string& name);

// Defaults, then the file (if given), then the environment. Relative paths
// in the file are resolved against the file's directory. Throws ConfigError
// for unknown keys, wrong types and out-of-range values.
AppConfig load_config(const std::optional<std::filesystem::path>& file, const Getenv& getenv = system_getenv);

}  // namespace alp
