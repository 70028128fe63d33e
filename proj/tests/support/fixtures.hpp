#pragma once

// Shared test fixtures: a small hand-built catalog and a seeded synthetic
// corpus generator.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "alp/catalog.hpp"
#include "alp/matcher.hpp"
#include "alp/store.hpp"

namespace alp::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

DcElement el(std::string name, std::string value, std::optional<std::string> qualifier = std::nullopt);

BibRecord make_record(std::string record_id, std::vector<DcElement> elements);

ArtistLibrary library(std::string slug, std::string artist, Provenance provenance,
                      std::optional<double> lat = std::nullopt,
                      std::optional<double> lon = std::nullopt,
                      std::string site = "");

// monet, detaille, kandinsky, brancusi (co-located with kandinsky) and an
// unlocated delacroix.
std::vector<ArtistLibrary> fixture_libraries();
// A dozen records across monet and detaille built around the titles the
// project started from (Bracquemond, the Doré-illustrated Cervantes and La Fontaine).
std::vector<BibRecord> fixture_records();
std::shared_ptr<const Snapshot> fixture_snapshot();

// Writes the fixture catalog into `root` through StoreWriter.
void write_fixture_store(const std::filesystem::path& root);
// Registers eight mark photographs over the fixture store (every rights
// value, with and without derivatives). File bodies are "ORIGINAL photoN"
// and "DERIVATIVE photoN".
std::vector<AssetRecord> write_fixture_assets(const std::filesystem::path& root);

struct SyntheticRow {
  std::string title;
  std::string creator;
  std::string date;
  std::string publisher;
  std::string subject;
};

// Deterministic pseudo-bibliographic rows with accented French vocabulary.
std::vector<SyntheticRow> synthetic_rows(std::size_t count, unsigned seed);
std::vector<BibRecord> synthetic_records(const std::string& slug, std::size_t count, unsigned seed);
// Ingest CSV text (with header) for `count` synthetic rows.
std::string synthetic_csv(const std::string& slug, std::size_t count, unsigned seed);

std::filesystem::path fixture_path(std::string_view relative);
std::filesystem::path schema_path(std::string_view relative);

// Matcher golden set: inputs from golden_input.json, expectations produced by
// tests/reference/reference_scorer.py.
struct GoldenCase {
  std::string name;
  BibRecord record;
  std::vector<matcher::ProviderRecord> candidates;
  std::vector<matcher::Scores> expected;  // same order as candidates; years_equal unused
  std::string verdict;
  std::optional<std::pair<std::string, std::string>> chosen;  // provider, id
};
std::vector<GoldenCase> golden_cases();

}  // namespace alp::testing
