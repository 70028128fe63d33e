#pragma once

// Curator command line: every store mutation goes through here, under the
// writer lock. Exit status is 0 on success, 1 when some rows or records
// failed (rejected CSV rows, provider errors) and 2 on fatal errors.

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "alp/config.hpp"
#include "alp/providers.hpp"
#include "alp/store.hpp"

namespace alp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitFatal = 2;

inline constexpr std::string_view kIngestReportHeader = "line,reason";

struct IngestSummary {
  int rows = 0;
  int accepted = 0;
  int rejected = 0;
  std::filesystem::path report_path;
  std::vector<std::string> record_ids;  // accepted, in input order
};

// Accepted rows get fresh ids; rejected rows go to the report CSV
// (kIngestReportHeader, one row per rejection). Throws IngestHeaderError.
IngestSummary ingest_csv(StoreWriter& writer, std::string_view csv, const std::filesystem::path& report_path);

struct MatchSummary {
  int records = 0;  // records in the library
  int skipped = 0;  // already had a surrogate
  int exact = 0;
  int approximate = 0;
  int no_match = 0;
  int provider_errors = 0;  // records with at least one failed provider
  int attached = 0;
};

// Queries every client for each record without a surrogate, classifies the
// candidates and attaches the chosen one. Writes the review CSV (matcher
// format, header included) to `csv`. Provider failures become
// provider_error rows and never stop the batch.
MatchSummary match_library(StoreWriter& writer, std::string_view slug,
                           const std::vector<std::unique_ptr<providers::ProviderClient>>& clients,
                           int max_results, std::ostream& csv);

// Clients for the enabled providers, wired to the configured transport mode.
std::vector<std::unique_ptr<providers::ProviderClient>> make_clients(
    const ProviderSettings& settings, providers::Sleeper sleep = providers::real_sleep);

nlohmann::json to_json(const IngestSummary& s);
nlohmann::json to_json(const MatchSummary& s);

// Entry point of the `alp` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const Getenv& getenv = system_getenv);

}  // namespace alp::cli
