#include "alp/config.hpp"

#include <cstdlib>

#include <json.hpp>

#include "alp/util.hpp"

namespace alp {

namespace fs = std::filesystem;
using nlohmann::json;

std::string env_name(std::string_view key) {
  std::string out = "ALP_";
  for (char c : key) {
    out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

std::optional<std::string> system_getenv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

namespace {

// Every key is set from a JSON value; environment strings are converted to
// JSON first (numbers parsed, lists split on commas).
void apply(AppConfig& c, std::string_view key, const json& v, const fs::path& base) {
  auto str = [&]() {
    if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
    return v.get<std::string>();
  };
  auto path = [&]() {
    fs::path p = str();
    return p.is_relative() && !base.empty() ? base / p : p;
  };
  auto integer = [&](int lo, int hi) {
    if (!v.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    const auto n = v.get<long long>();
    if (n < lo || n > hi) {
      throw ConfigError(std::string(key) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(n);
  };

  if (key == "store_root") c.store_root = path();
  else if (key == "server.host") c.host = str();
  else if (key == "server.port") c.port = integer(0, 65535);
  else if (key == "server.static_dir") c.static_dir = path();
  else if (key == "oai.repository_id") c.oai.repository_id = str();
  else if (key == "oai.repository_name") c.oai.repository_name = str();
  else if (key == "oai.base_url") c.oai.base_url = str();
  else if (key == "oai.admin_email") c.oai.admin_email = str();
  else if (key == "oai.page_size") c.oai.page_size = integer(1, 10000);
  else if (key == "providers.mode") {
    c.providers.mode = str();
    if (c.providers.mode != "live" && c.providers.mode != "replay" && c.providers.mode != "record") {
      throw ConfigError("providers.mode must be live, replay or record");
    }
  } else if (key == "providers.fixtures_dir") c.providers.fixtures_dir = path();
  else if (key == "providers.enabled") {
    if (!v.is_array()) throw ConfigError("providers.enabled must be a list");
    c.providers.enabled.clear();
    for (const auto& p : v) {
      if (!p.is_string() || !parse_provider(p.get<std::string>())) {
        throw ConfigError("providers.enabled: unknown provider " + p.dump());
      }
      c.providers.enabled.push_back(p.get<std::string>());
    }
  } else if (key == "providers.sru_endpoint") c.providers.sru_endpoint = str();
  else if (key == "providers.rest_endpoint") c.providers.rest_endpoint = str();
  else if (key == "providers.rate_per_second") {
    if (!v.is_number() || v.get<double>() <= 0) throw ConfigError("providers.rate_per_second must be positive");
    c.providers.rate_per_second = v.get<double>();
  } else if (key == "providers.max_results") c.providers.max_results = integer(1, 50);
  else if (key == "providers.timeout_seconds") c.providers.timeout_seconds = integer(1, 600);
  else if (key == "providers.static_candidates") c.providers.static_candidates = path();
  else throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) flatten(v, key, out);
    else out.emplace_back(key, v);
  }
}

json from_env_text(std::string_view key, const std::string& text) {
  if (key == "providers.enabled") {
    json arr = json::array();
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!item.empty()) arr.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return arr;
  }
  if (key == "server.port" || key == "oai.page_size" || key == "providers.max_results" ||
      key == "providers.timeout_seconds" || key == "providers.rate_per_second") {
    try {
      std::size_t used = 0;
      const double d = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      if (key == "providers.rate_per_second") return d;
      if (d != static_cast<long long>(d)) throw std::invalid_argument(text);
      return static_cast<long long>(d);
    } catch (const std::exception&) {
      throw ConfigError(env_name(key) + " must be a number");
    }
  }
  return text;
}

}  // namespace

AppConfig load_config(const std::optional<fs::path>& file, const Getenv& getenv) {
  AppConfig c;
  if (file) {
    json j;
    try {
      j = json::parse(read_file(*file));
    } catch (const json::exception& e) {
      throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    } catch (const std::exception& e) {
      throw ConfigError("cannot read config file: " + std::string(e.what()));
    }
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    std::vector<std::pair<std::string, json>> entries;
    flatten(j, "", entries);
    const fs::path base = fs::absolute(*file).parent_path();
    for (const auto& [k, v] : entries) apply(c, k, v, base);
  }
  for (auto key : kConfigKeys) {
    if (auto v = getenv(env_name(key))) apply(c, key, from_env_text(key, *v), {});
  }
  return c;
}

}  // namespace alp
