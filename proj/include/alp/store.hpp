#pragma once

// File-backed document store.
//
// Layout under the store root:
//   libraries.json                          array of ArtistLibrary
//   collections/<slug>/records.jsonl        one BibRecord per line, sorted by record_id
//   collections/<slug>/assets.jsonl         one AssetRecord per line
//   collections/<slug>/assets/              asset files
//   .writer.lock                            present while a writer is active
//
// One writer at a time (StoreWriter holds the lock); readers load an
// immutable Snapshot.

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "alp/catalog.hpp"
#include "alp/error.hpp"
#include "alp/util.hpp"

namespace alp {

namespace store_paths {
std::filesystem::path libraries(const std::filesystem::path& root);
std::filesystem::path collection(const std::filesystem::path& root, std::string_view slug);
std::filesystem::path records(const std::filesystem::path& root, std::string_view slug);
std::filesystem::path assets_index(const std::filesystem::path& root, std::string_view slug);
std::filesystem::path assets_dir(const std::filesystem::path& root, std::string_view slug);
std::filesystem::path lock(const std::filesystem::path& root);
}  // namespace store_paths

// Raised when a store fails to load. Each problem is "<relative file>:<line>: <message>".
class StoreCorruptError : public StoreError {
 public:
  explicit StoreCorruptError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Exclusive writer role, held for the lifetime of the object.
class WriterLock {
 public:
  explicit WriterLock(const std::filesystem::path& root);
  ~WriterLock();
  WriterLock(const WriterLock&) = delete;
  WriterLock& operator=(const WriterLock&) = delete;

 private:
  std::filesystem::path path_;
};

class StoreWriter {
 public:
  explicit StoreWriter(std::filesystem::path root, Clock clock = utc_now);

  const std::filesystem::path& root() const { return root_; }

  std::vector<ArtistLibrary> libraries() const;
  std::set<std::string> library_slugs() const;
  // Inserts or replaces by slug. Throws StoreError on violations.
  void put_library(const ArtistLibrary& library);

  // Merges `records` into the collection: an existing record with the same id
  // is replaced, others are appended. Records are validated first. A record
  // with an empty datestamp, or whose content changed, is stamped with the
  // writer clock. Throws DuplicateIdError on repeated ids within `records`.
  void write(std::string_view slug, const std::vector<BibRecord>& records);
  std::vector<BibRecord> read(std::string_view slug) const;
  // Highest sequence number used in the collection, 0 when empty.
  int max_sequence(std::string_view slug) const;

  std::vector<AssetRecord> read_assets(std::string_view slug) const;
  void write_assets(std::string_view slug, const std::vector<AssetRecord>& assets);

 private:
  std::filesystem::path root_;
  WriterLock lock_;
  Clock clock_;
};

// Reads one collection without taking the writer lock; sorted by record_id.
std::vector<BibRecord> store_read(const std::filesystem::path& root, std::string_view slug);

// Immutable, fully validated view of a store.
class Snapshot {
 public:
  // Throws StoreCorruptError listing every problem found.
  static std::shared_ptr<const Snapshot> load(const std::filesystem::path& root);
  static std::shared_ptr<const Snapshot> from_memory(std::vector<ArtistLibrary> libraries,
                                                     std::vector<BibRecord> records,
                                                     std::vector<AssetRecord> assets = {});

  const std::filesystem::path& root() const { return root_; }
  // Sorted by slug.
  const std::vector<ArtistLibrary>& libraries() const { return libraries_; }
  // Sorted by record_id.
  const std::vector<BibRecord>& records() const { return records_; }
  const std::vector<AssetRecord>& assets() const { return assets_; }

  const ArtistLibrary* library(std::string_view slug) const;
  const BibRecord* record(std::string_view record_id) const;
  const AssetRecord* asset(std::string_view asset_id) const;
  std::vector<const BibRecord*> records_of(std::string_view slug) const;
  std::set<std::string> library_slugs() const;

  // Content hash of the snapshot; changes whenever any stored byte changes.
  const std::string& fingerprint() const { return fingerprint_; }

 private:
  Snapshot() = default;
  void build_lookups();

  std::filesystem::path root_;
  std::vector<ArtistLibrary> libraries_;
  std::vector<BibRecord> records_;
  std::vector<AssetRecord> assets_;
  std::unordered_map<std::string, std::size_t> record_pos_;
  std::unordered_map<std::string, std::size_t> asset_pos_;
  std::map<std::string, std::size_t, std::less<>> library_pos_;
  std::string fingerprint_;
};

}  // namespace alp
