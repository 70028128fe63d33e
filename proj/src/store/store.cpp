#include "alp/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

#include "alp/json_codec.hpp"

namespace alp {
namespace fs = std::filesystem;
using json_codec::Json;

namespace store_paths {
fs::path libraries(const fs::path& root) { return root / "libraries.json"; }
fs::path collection(const fs::path& root, std::string_view slug) {
  return root / "collections" / std::string(slug);
}
fs::path records(const fs::path& root, std::string_view slug) {
  return collection(root, slug) / "records.jsonl";
}
fs::path assets_index(const fs::path& root, std::string_view slug) {
  return collection(root, slug) / "assets.jsonl";
}
fs::path assets_dir(const fs::path& root, std::string_view slug) {
  return collection(root, slug) / "assets";
}
fs::path lock(const fs::path& root) { return root / ".writer.lock"; }
}  // namespace store_paths

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string out = "store is corrupt:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

template <typename T, typename Decode>
std::vector<T> parse_jsonl(const std::string& content, const std::string& label, Decode decode,
                           std::vector<std::string>& problems) {
  std::vector<T> out;
  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(decode(Json::parse(line)));
    } catch (const std::exception& e) {
      problems.push_back(label + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<BibRecord> parse_records_strict(const fs::path& path) {
  if (!fs::exists(path)) return {};
  std::vector<std::string> problems;
  auto records = parse_jsonl<BibRecord>(read_file(path), path.filename().string(),
                                        json_codec::record_from_json, problems);
  if (!problems.empty()) throw StoreCorruptError(problems);
  return records;
}

std::string to_jsonl(const auto& items) {
  std::string out;
  for (const auto& item : items) {
    out += json_codec::to_json(item).dump();
    out += '\n';
  }
  return out;
}

std::vector<ArtistLibrary> read_libraries(const fs::path& root, std::vector<std::string>& problems) {
  const auto path = store_paths::libraries(root);
  if (!fs::exists(path)) return {};
  std::vector<ArtistLibrary> out;
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const std::exception& e) {
    problems.push_back(std::string("libraries.json:1: ") + e.what());
    return out;
  }
  if (!doc.is_array()) {
    problems.push_back("libraries.json:1: expected an array");
    return out;
  }
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      out.push_back(json_codec::library_from_json(doc[i]));
    } catch (const std::exception& e) {
      problems.push_back("libraries.json:entry " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

bool same_content(BibRecord a, BibRecord b) {
  a.datestamp.clear();
  b.datestamp.clear();
  return a == b;
}

}  // namespace

StoreCorruptError::StoreCorruptError(std::vector<std::string> problems)
    : StoreError(join_problems(problems)), problems_(std::move(problems)) {}

WriterLock::WriterLock(const fs::path& root) : path_(store_paths::lock(root)) {
  fs::create_directories(root);
  const int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw LockHeldError("another writer holds the store lock (" + path_.filename().string() + ")");
    }
    throw StoreError(std::string("cannot create writer lock: ") + std::strerror(errno));
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

WriterLock::~WriterLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

StoreWriter::StoreWriter(fs::path root, Clock clock)
    : root_(std::move(root)), lock_(root_), clock_(std::move(clock)) {
  fs::create_directories(root_ / "collections");
  if (!fs::exists(store_paths::libraries(root_))) {
    write_file_atomic(store_paths::libraries(root_), "[]\n");
  }
}

std::vector<ArtistLibrary> StoreWriter::libraries() const {
  std::vector<std::string> problems;
  auto libs = read_libraries(root_, problems);
  if (!problems.empty()) throw StoreCorruptError(problems);
  return libs;
}

std::set<std::string> StoreWriter::library_slugs() const {
  std::set<std::string> out;
  for (const auto& l : libraries()) out.insert(l.slug);
  return out;
}

void StoreWriter::put_library(const ArtistLibrary& library) {
  const auto violations = validate_library(library);
  if (!violations.empty()) {
    throw StoreError("invalid library: " + violations.front().field + " " + violations.front().rule);
  }
  auto libs = libraries();
  auto it = std::find_if(libs.begin(), libs.end(),
                         [&](const ArtistLibrary& l) { return l.slug == library.slug; });
  if (it != libs.end()) {
    *it = library;
  } else {
    libs.push_back(library);
  }
  std::sort(libs.begin(), libs.end(),
            [](const ArtistLibrary& a, const ArtistLibrary& b) { return a.slug < b.slug; });
  Json doc = Json::array();
  for (const auto& l : libs) doc.push_back(json_codec::to_json(l));
  write_file_atomic(store_paths::libraries(root_), doc.dump(2) + "\n");
}

void StoreWriter::write(std::string_view slug, const std::vector<BibRecord>& records) {
  const auto known = library_slugs();
  if (!known.contains(std::string(slug))) {
    throw StoreError("unknown library '" + std::string(slug) + "'");
  }
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.record_id).second) throw DuplicateIdError(r.record_id);
    if (r.library_slug != slug) {
      throw StoreError("record " + r.record_id + " does not belong to library '" +
                       std::string(slug) + "'");
    }
    const auto violations = validate_record(r, known);
    if (!violations.empty()) {
      throw StoreError("record " + r.record_id + " is invalid: " + violations.front().field + " " +
                       violations.front().rule);
    }
  }

  auto merged = read(slug);
  const std::string now = clock_();
  for (auto incoming : records) {
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const BibRecord& r) { return r.record_id == incoming.record_id; });
    if (it != merged.end()) {
      if (incoming.datestamp.empty() || !same_content(*it, incoming)) incoming.datestamp = now;
      *it = std::move(incoming);
    } else {
      if (incoming.datestamp.empty()) incoming.datestamp = now;
      merged.push_back(std::move(incoming));
    }
  }
  std::sort(merged.begin(), merged.end(),
            [](const BibRecord& a, const BibRecord& b) { return a.record_id < b.record_id; });
  write_file_atomic(store_paths::records(root_, slug), to_jsonl(merged));
}

std::vector<BibRecord> StoreWriter::read(std::string_view slug) const {
  return store_read(root_, slug);
}

int StoreWriter::max_sequence(std::string_view slug) const {
  int best = 0;
  for (const auto& r : read(slug)) best = std::max(best, record_sequence(r.record_id).value_or(0));
  return best;
}

std::vector<AssetRecord> StoreWriter::read_assets(std::string_view slug) const {
  const auto path = store_paths::assets_index(root_, slug);
  if (!fs::exists(path)) return {};
  std::vector<std::string> problems;
  auto assets = parse_jsonl<AssetRecord>(read_file(path), path.filename().string(),
                                         json_codec::asset_from_json, problems);
  if (!problems.empty()) throw StoreCorruptError(problems);
  return assets;
}

void StoreWriter::write_assets(std::string_view slug, const std::vector<AssetRecord>& assets) {
  auto sorted = assets;
  std::sort(sorted.begin(), sorted.end(),
            [](const AssetRecord& a, const AssetRecord& b) { return a.asset_id < b.asset_id; });
  write_file_atomic(store_paths::assets_index(root_, slug), to_jsonl(sorted));
}

std::vector<BibRecord> store_read(const fs::path& root, std::string_view slug) {
  auto records = parse_records_strict(store_paths::records(root, slug));
  std::sort(records.begin(), records.end(),
            [](const BibRecord& a, const BibRecord& b) { return a.record_id < b.record_id; });
  return records;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Snapshot> Snapshot::load(const fs::path& root) {
  std::vector<std::string> problems;
  if (!fs::is_directory(root)) {
    throw StoreCorruptError({"store root does not exist"});
  }
  std::shared_ptr<Snapshot> snap(new Snapshot());
  snap->root_ = root;

  std::string hash_input;
  auto add_hash = [&](const std::string& label, const std::string& content) {
    hash_input += label;
    hash_input.push_back('\0');
    hash_input += content;
    hash_input.push_back('\0');
  };
  if (fs::exists(store_paths::libraries(root))) {
    add_hash("libraries.json", read_file(store_paths::libraries(root)));
  }

  snap->libraries_ = read_libraries(root, problems);
  std::set<std::string> slugs;
  for (const auto& lib : snap->libraries_) {
    for (const auto& v : validate_library(lib)) {
      problems.push_back("libraries.json:" + lib.slug + ": " + v.field + " " + v.rule);
    }
    if (!slugs.insert(lib.slug).second) {
      problems.push_back("libraries.json:" + lib.slug + ": duplicate slug");
    }
  }

  std::vector<std::string> dirs;
  if (fs::is_directory(root / "collections")) {
    for (const auto& entry : fs::directory_iterator(root / "collections")) {
      if (entry.is_directory()) dirs.push_back(entry.path().filename().string());
    }
  }
  std::sort(dirs.begin(), dirs.end());

  std::set<std::string> record_ids;
  for (const auto& dir : dirs) {
    const std::string rel = "collections/" + dir + "/records.jsonl";
    if (!slugs.contains(dir)) {
      problems.push_back("collections/" + dir + ":0: directory has no library entry");
      continue;
    }
    const auto rec_path = store_paths::records(root, dir);
    if (fs::exists(rec_path)) {
      const std::string content = read_file(rec_path);
      add_hash(rel, content);
      std::istringstream in(content);
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = rel + ":" + std::to_string(line_no) + ": ";
        try {
          BibRecord r = json_codec::record_from_json(Json::parse(line));
          for (const auto& v : validate_record(r, slugs)) {
            problems.push_back(where + v.field + " " + v.rule);
          }
          if (r.library_slug != dir) problems.push_back(where + "record filed under wrong collection");
          if (!record_ids.insert(r.record_id).second) {
            problems.push_back(where + "duplicate record_id " + r.record_id);
          }
          snap->records_.push_back(std::move(r));
        } catch (const std::exception& e) {
          problems.push_back(where + e.what());
        }
      }
    }
    const auto asset_path = store_paths::assets_index(root, dir);
    if (fs::exists(asset_path)) {
      const std::string content = read_file(asset_path);
      const std::string arel = "collections/" + dir + "/assets.jsonl";
      add_hash(arel, content);
      auto assets = parse_jsonl<AssetRecord>(content, arel, json_codec::asset_from_json, problems);
      for (auto& a : assets) snap->assets_.push_back(std::move(a));
    }
  }

  std::sort(snap->libraries_.begin(), snap->libraries_.end(),
            [](const ArtistLibrary& a, const ArtistLibrary& b) { return a.slug < b.slug; });
  std::sort(snap->records_.begin(), snap->records_.end(),
            [](const BibRecord& a, const BibRecord& b) { return a.record_id < b.record_id; });
  std::sort(snap->assets_.begin(), snap->assets_.end(),
            [](const AssetRecord& a, const AssetRecord& b) { return a.asset_id < b.asset_id; });
  snap->build_lookups();

  for (const auto& a : snap->assets_) {
    const std::string where = "collections/" + record_slug(a.record_id) + "/assets.jsonl:" + a.asset_id + ": ";
    if (snap->record(a.record_id) == nullptr) problems.push_back(where + "unknown record_id");
    if (!fs::exists(root / a.original)) problems.push_back(where + "original file missing");
    if (a.derivative && !fs::exists(root / *a.derivative)) {
      problems.push_back(where + "derivative file missing");
    }
    if (a.rights != Rights::PublicDomain && !a.derivative) {
      problems.push_back(where + "non-public asset has no derivative");
    }
  }
  for (const auto& r : snap->records_) {
    for (const auto& m : r.marks) {
      for (const auto& id : m.asset_ids) {
        if (snap->asset(id) == nullptr) {
          problems.push_back("collections/" + r.library_slug + "/records.jsonl:" + r.record_id +
                             ": mark references unknown asset " + id);
        }
      }
    }
  }

  if (!problems.empty()) throw StoreCorruptError(problems);
  snap->fingerprint_ = sha256_hex(hash_input);
  return snap;
}

std::shared_ptr<const Snapshot> Snapshot::from_memory(std::vector<ArtistLibrary> libraries,
                                                      std::vector<BibRecord> records,
                                                      std::vector<AssetRecord> assets) {
  std::shared_ptr<Snapshot> snap(new Snapshot());
  snap->libraries_ = std::move(libraries);
  snap->records_ = std::move(records);
  snap->assets_ = std::move(assets);
  std::sort(snap->libraries_.begin(), snap->libraries_.end(),
            [](const ArtistLibrary& a, const ArtistLibrary& b) { return a.slug < b.slug; });
  std::sort(snap->records_.begin(), snap->records_.end(),
            [](const BibRecord& a, const BibRecord& b) { return a.record_id < b.record_id; });
  std::sort(snap->assets_.begin(), snap->assets_.end(),
            [](const AssetRecord& a, const AssetRecord& b) { return a.asset_id < b.asset_id; });
  snap->build_lookups();
  std::string hash_input;
  for (const auto& l : snap->libraries_) hash_input += json_codec::to_json(l).dump() + "\n";
  for (const auto& r : snap->records_) hash_input += json_codec::to_json(r).dump() + "\n";
  for (const auto& a : snap->assets_) hash_input += json_codec::to_json(a).dump() + "\n";
  snap->fingerprint_ = sha256_hex(hash_input);
  return snap;
}

void Snapshot::build_lookups() {
  for (std::size_t i = 0; i < records_.size(); ++i) record_pos_.emplace(records_[i].record_id, i);
  for (std::size_t i = 0; i < assets_.size(); ++i) asset_pos_.emplace(assets_[i].asset_id, i);
  for (std::size_t i = 0; i < libraries_.size(); ++i) library_pos_.emplace(libraries_[i].slug, i);
}

const ArtistLibrary* Snapshot::library(std::string_view slug) const {
  auto it = library_pos_.find(slug);
  return it == library_pos_.end() ? nullptr : &libraries_[it->second];
}

const BibRecord* Snapshot::record(std::string_view record_id) const {
  auto it = record_pos_.find(std::string(record_id));
  return it == record_pos_.end() ? nullptr : &records_[it->second];
}

const AssetRecord* Snapshot::asset(std::string_view asset_id) const {
  auto it = asset_pos_.find(std::string(asset_id));
  return it == asset_pos_.end() ? nullptr : &assets_[it->second];
}

std::vector<const BibRecord*> Snapshot::records_of(std::string_view slug) const {
  std::vector<const BibRecord*> out;
  for (const auto& r : records_) {
    if (r.library_slug == slug) out.push_back(&r);
  }
  return out;
}

std::set<std::string> Snapshot::library_slugs() const {
  std::set<std::string> out;
  for (const auto& l : libraries_) out.insert(l.slug);
  return out;
}

}  // namespace alp
