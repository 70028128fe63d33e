#pragma once

// Edition matching: scores provider candidates against a catalog record and
// decides whether the best one is the same edition, an approximate edition
// or no match at all.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alp/catalog.hpp"
#include "alp/error.hpp"

namespace alp::matcher {

struct ProviderRecord {
  Provider provider = Provider::Fixture;
  std::string provider_record_id;
  std::optional<std::string> title;
  std::optional<std::string> creator;
  std::optional<std::string> date;
  std::optional<std::string> publisher;
  std::string access_url;

  friend bool operator==(const ProviderRecord&, const ProviderRecord&) = default;
};

struct MatchConfig {
  double w_title = 0.45;
  double w_creator = 0.25;
  double w_year = 0.20;
  double w_publisher = 0.10;

  double exact_title = 0.9;
  double exact_creator = 0.9;
  double exact_publisher = 0.6;
  double approx_total = 0.55;
  double approx_title = 0.5;

  // Score given to a component when either side lacks the field.
  double neutral = 0.5;
  int near_year_window = 2;
};

struct Scores {
  double title_sim = 0.0;
  double creator_sim = 0.0;
  double year_score = 0.0;
  double publisher_sim = 0.0;
  double total = 0.0;
  bool years_equal = false;  // both years present and equal

  friend bool operator==(const Scores&, const Scores&) = default;
};

enum class Verdict { ExactEdition, ApproximateEdition, NoMatch };
std::string_view to_string(Verdict verdict);

struct ScoredCandidate {
  ProviderRecord candidate;
  Scores scores;
};

struct MatchReport {
  // Best first: descending total, then provider wire name, then id.
  std::vector<ScoredCandidate> candidates;
  Verdict verdict = Verdict::NoMatch;
  // Index into `candidates` of the chosen candidate; empty for NoMatch.
  std::optional<std::size_t> chosen;

  const ScoredCandidate* chosen_candidate() const {
    return chosen ? &candidates[*chosen] : nullptr;
  }
};

Scores score_candidate(const BibRecord& record, const ProviderRecord& candidate,
                       const MatchConfig& config = {});

MatchReport classify(const BibRecord& record, std::vector<ProviderRecord> candidates,
                     const MatchConfig& config = {});

// Appends the chosen candidate as a surrogate. Re-attaching the same
// (provider, provider_record_id) replaces nothing and adds nothing. Throws
// PreconditionError when the verdict is NoMatch.
BibRecord attach_surrogate(BibRecord record, const MatchReport& report);

// Curator review CSV, one row per record.
inline constexpr std::string_view kReportCsvHeader =
    "record_id,provider,provider_record_id,title_sim,creator_sim,year_score,publisher_sim,total,"
    "verdict";

// Row for the best candidate; provider columns and scores are empty when
// there were no candidates.
std::string report_csv_row(std::string_view record_id, const MatchReport& report);
// Row for a record whose provider lookup failed.
std::string provider_error_csv_row(std::string_view record_id, Provider provider);

// Shortest decimal text that reads back to the same double.
std::string format_score(double value);

}  // namespace alp::matcher
