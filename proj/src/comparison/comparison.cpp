#include "alp/comparison.hpp"

#include <algorithm>
#include <set>

#include "alp/textnorm.hpp"

namespace alp::comparison {

namespace {

using Json = nlohmann::json;

std::string join(const std::vector<std::string>& tokens, char sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

void check_libraries(const Snapshot& snapshot, const std::vector<std::string>& libraries,
                     std::size_t minimum) {
  if (libraries.size() < minimum) {
    throw PreconditionError("at least " + std::to_string(minimum) + " libraries are required");
  }
  std::set<std::string> seen;
  for (const auto& slug : libraries) {
    if (!seen.insert(slug).second) throw PreconditionError("duplicate library: " + slug);
    if (!snapshot.library(slug)) throw NotFoundError("unknown library: " + slug);
  }
}

}  // namespace

std::string_view to_string(Level level) { return level == Level::Work ? "work" : "edition"; }

std::optional<Level> parse_level(std::string_view text) {
  if (text == "work") return Level::Work;
  if (text == "edition") return Level::Edition;
  return std::nullopt;
}

std::string surname(std::string_view creator) {
  return join(textnorm::tokenize(creator.substr(0, creator.find(','))), ' ');
}

WorkKey work_key(const BibRecord& record) {
  WorkKey key;
  key.title_tokens = textnorm::token_set(record.first("title").value_or(""));
  if (auto c = record.first("creator")) key.creator_surname = surname(*c);
  return key;
}

EditionKey edition_key(const BibRecord& record) {
  EditionKey key;
  key.work = work_key(record);
  if (auto d = record.first("date")) key.year = textnorm::extract_year(*d);
  key.publisher_tokens = textnorm::token_set(record.first("publisher").value_or(""));
  return key;
}

std::string canonical(const WorkKey& key) {
  return key.creator_surname + "|" + join(key.title_tokens, ' ');
}

std::string canonical(const EditionKey& key) {
  return canonical(key.work) + "|" + (key.year ? std::to_string(*key.year) : "") + "|" +
         join(key.publisher_tokens, ' ');
}

ComparisonReport compare(const Snapshot& snapshot, const std::vector<std::string>& libraries,
                         Level level) {
  check_libraries(snapshot, libraries, 2);

  // canonical key -> slug -> record ids
  std::map<std::string, std::map<std::string, std::vector<std::string>>> holdings;
  std::vector<std::set<std::string>> key_sets(libraries.size());
  for (std::size_t i = 0; i < libraries.size(); ++i) {
    for (const BibRecord* r : snapshot.records_of(libraries[i])) {
      std::string key = level == Level::Work ? canonical(work_key(*r)) : canonical(edition_key(*r));
      holdings[key][libraries[i]].push_back(r->record_id);
      key_sets[i].insert(std::move(key));
    }
  }

  ComparisonReport report;
  report.level = level;
  report.libraries = libraries;
  for (auto& [key, by_slug] : holdings) {
    if (by_slug.size() < 2) continue;
    SharedGroup group;
    group.key = key;
    for (const auto& slug : libraries) {
      auto it = by_slug.find(slug);
      if (it == by_slug.end()) continue;
      group.libraries.push_back(slug);
      std::sort(it->second.begin(), it->second.end());
      group.records[slug] = it->second;
    }
    report.groups.push_back(std::move(group));
  }
  for (std::size_t i = 0; i < libraries.size(); ++i) {
    for (std::size_t j = i + 1; j < libraries.size(); ++j) {
      std::vector<std::string> common, all;
      std::set_intersection(key_sets[i].begin(), key_sets[i].end(), key_sets[j].begin(),
                            key_sets[j].end(), std::back_inserter(common));
      std::set_union(key_sets[i].begin(), key_sets[i].end(), key_sets[j].begin(),
                     key_sets[j].end(), std::back_inserter(all));
      PairOverlap p{libraries[i], libraries[j], common.size(), all.size(), 0.0};
      if (!all.empty()) p.jaccard = static_cast<double>(common.size()) / static_cast<double>(all.size());
      report.pairs.push_back(std::move(p));
    }
  }
  return report;
}

std::vector<AuthorCount> author_frequency(const Snapshot& snapshot,
                                          const std::vector<std::string>& libraries) {
  check_libraries(snapshot, libraries, 1);
  std::map<std::string, AuthorCount> counts;
  for (const auto& slug : libraries) {
    for (const BibRecord* r : snapshot.records_of(slug)) {
      const std::string name = work_key(*r).creator_surname;
      if (name.empty()) continue;
      auto& c = counts[name];
      c.surname = name;
      ++c.per_library[slug];
      ++c.total;
    }
  }
  std::vector<AuthorCount> out;
  for (auto& [name, c] : counts) out.push_back(std::move(c));
  std::stable_sort(out.begin(), out.end(), [](const AuthorCount& a, const AuthorCount& b) {
    return a.total != b.total ? a.total > b.total : a.surname < b.surname;
  });
  return out;
}

Json to_json(const ComparisonReport& report) {
  Json groups = Json::array();
  for (const auto& g : report.groups) {
    Json records = Json::object();
    for (const auto& [slug, ids] : g.records) records[slug] = ids;
    groups.push_back({{"key", g.key}, {"libraries", g.libraries}, {"records", std::move(records)}});
  }
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"a", p.a},
                     {"b", p.b},
                     {"intersection", p.intersection},
                     {"union", p.union_size},
                     {"jaccard", p.jaccard}});
  }
  return {{"level", to_string(report.level)},
          {"libraries", report.libraries},
          {"groups", std::move(groups)},
          {"pairs", std::move(pairs)}};
}

Json to_json(const std::vector<AuthorCount>& authors) {
  Json out = Json::array();
  for (const auto& a : authors) {
    out.push_back({{"surname", a.surname}, {"counts", a.per_library}, {"total", a.total}});
  }
  return out;
}

}  // namespace alp::comparison
