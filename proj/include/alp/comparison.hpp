#pragma once

// Cross-library analytics: shared works, shared editions, author frequency
// and pairwise overlap.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "alp/catalog.hpp"
#include "alp/store.hpp"

namespace alp::comparison {

struct WorkKey {
  std::vector<std::string> title_tokens;  // sorted, unique, folded
  std::string creator_surname;            // folded tokens before the first comma, space-joined

  friend bool operator==(const WorkKey&, const WorkKey&) = default;
  friend auto operator<=>(const WorkKey&, const WorkKey&) = default;
};

struct EditionKey {
  WorkKey work;
  std::optional<int> year;
  std::vector<std::string> publisher_tokens;  // sorted, unique, folded

  friend bool operator==(const EditionKey&, const EditionKey&) = default;
  friend auto operator<=>(const EditionKey&, const EditionKey&) = default;
};

enum class Level { Work, Edition };
std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

// "Doré, Gustave" -> "dore"; "" when `creator` is empty.
std::string surname(std::string_view creator);

WorkKey work_key(const BibRecord& record);
EditionKey edition_key(const BibRecord& record);

// Canonical text forms, "<surname>|<title tokens>" and
// "<surname>|<title tokens>|<year>|<publisher tokens>". Groups are ordered by these.
std::string canonical(const WorkKey& key);
std::string canonical(const EditionKey& key);

struct SharedGroup {
  std::string key;                                         // canonical serialization
  std::vector<std::string> libraries;                      // holding libraries, request order
  std::map<std::string, std::vector<std::string>> records;  // slug -> sorted record ids

  friend bool operator==(const SharedGroup&, const SharedGroup&) = default;
};

struct PairOverlap {
  std::string a;
  std::string b;
  std::size_t intersection = 0;
  std::size_t union_size = 0;
  double jaccard = 0.0;  // 0 when both key sets are empty

  friend bool operator==(const PairOverlap&, const PairOverlap&) = default;
};

struct ComparisonReport {
  Level level = Level::Work;
  std::vector<std::string> libraries;  // request order
  std::vector<SharedGroup> groups;     // keys held by two or more libraries
  std::vector<PairOverlap> pairs;      // every i < j in request order
};

// Throws PreconditionError for fewer than two or repeated slugs and
// NotFoundError for an unknown slug.
ComparisonReport compare(const Snapshot& snapshot, const std::vector<std::string>& libraries,
                         Level level);

struct AuthorCount {
  std::string surname;
  std::map<std::string, int> per_library;  // only libraries holding the author
  int total = 0;

  friend bool operator==(const AuthorCount&, const AuthorCount&) = default;
};

// Record counts per creator surname, by descending total then ascending
// surname. Records without a creator are not counted. Throws
// PreconditionError on an empty or repeated list, NotFoundError on an unknown slug.
std::vector<AuthorCount> author_frequency(const Snapshot& snapshot,
                                          const std::vector<std::string>& libraries);

nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const std::vector<AuthorCount>& authors);

}  // namespace alp::comparison
