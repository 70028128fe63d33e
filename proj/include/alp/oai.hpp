#pragma once

// OAI-PMH 2.0 data provider over a store snapshot. Only oai_dc is
// disseminated; sets are library slugs; identifiers are
// oai:<repository_id>:<record_id>.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "alp/store.hpp"
#include "alp/util.hpp"

namespace alp::oai {

inline constexpr std::string_view kOaiNamespace = "http://www.openarchives.org/OAI/2.0/";
inline constexpr int kPageSize = 100;

struct Config {
  std::string repository_id = "alp";
  std::string repository_name = "Artists' Libraries";
  std::string base_url = "http://localhost:8080/oai";
  std::string admin_email = "curator@example.org";
  int page_size = kPageSize;
};

// Continuation state of a list request. Opaque on the wire: base64url of
// the compact JSON form, keys sorted.
struct ResumptionToken {
  std::string verb;  // ListIdentifiers or ListRecords
  std::optional<std::string> set_spec;
  std::optional<std::string> from;
  std::optional<std::string> until;
  std::string metadata_prefix;
  std::size_t offset = 0;
  std::string snapshot_id;

  friend bool operator==(const ResumptionToken&, const ResumptionToken&) = default;
};

std::string encode_token(const ResumptionToken& token);
// nullopt for anything encode_token() could not have produced.
std::optional<ResumptionToken> decode_token(std::string_view text);

// Request arguments, verb included. A repeated argument is a badArgument.
using Params = std::multimap<std::string, std::string>;

class Endpoint {
 public:
  Endpoint(std::shared_ptr<const Snapshot> snapshot, Config config, Clock clock = utc_now);

  // Always returns an OAI-PMH document; protocol errors are <error> elements.
  std::string handle(const Params& params) const;
  std::string handle(std::string_view verb, Params params) const;

  std::string identifier(std::string_view record_id) const;
  // record_id of an identifier of this repository.
  std::optional<std::string> record_id(std::string_view identifier) const;

  const Config& config() const { return config_; }

 private:
  struct Reply;
  Reply dispatch(const Params& params) const;
  Reply identify() const;
  Reply list_metadata_formats(const Params& params) const;
  Reply list_sets(const Params& params) const;
  Reply get_record(const Params& params) const;
  Reply list(const std::string& verb, const Params& params) const;
  std::string header_xml(const BibRecord& record) const;
  std::string record_xml(const BibRecord& record) const;

  std::shared_ptr<const Snapshot> snapshot_;
  Config config_;
  Clock clock_;
};

}  // namespace alp::oai
