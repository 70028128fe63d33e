#include <algorithm>
#include <set>

#include "alp/query.hpp"
#include "alp/textnorm.hpp"
#include "alp/util.hpp"

namespace alp::query {

namespace {

using Json = nlohmann::json;

constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
constexpr std::size_t kAnySlot = 5;
constexpr std::array<std::string_view, 6> kSlotNames = {"title",   "creator",  "publisher",
                                                        "subject", "language", "any"};

const std::vector<DocId> kEmpty;

std::size_t element_slot(std::string_view name) {
  if (name == "title") return 0;
  if (name == "creator") return 1;
  if (name == "publisher") return 2;
  if (name == "subject") return 3;
  if (name == "language") return 4;
  return kNoSlot;
}

std::vector<DocId> intersect(const std::vector<DocId>& a, const std::vector<DocId>& b) {
  std::vector<DocId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<DocId> unite(const std::vector<DocId>& a, const std::vector<DocId>& b) {
  std::vector<DocId> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<DocId> subtract(const std::vector<DocId>& a, const std::vector<DocId>& b) {
  std::vector<DocId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

}  // namespace

std::string facet_key(std::string_view text) { return join_tokens(textnorm::tokenize(text)); }

std::size_t SearchIndex::text_slot(Field field) {
  switch (field) {
    case Field::Title: return 0;
    case Field::Creator: return 1;
    case Field::Publisher: return 2;
    case Field::Subject: return 3;
    case Field::Language: return 4;
    case Field::Any: return kAnySlot;
    default: return kNoSlot;
  }
}

std::shared_ptr<const SearchIndex> SearchIndex::build(const std::vector<BibRecord>& records) {
  std::vector<const BibRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const BibRecord* a, const BibRecord* b) { return a->record_id < b->record_id; });

  std::shared_ptr<SearchIndex> index(new SearchIndex());
  for (const BibRecord* r : sorted) {
    index->ids_.push_back(r->record_id);
    index->libraries_.push_back(r->library_slug);

    std::array<FieldValues, kTextFields> fields;
    std::vector<int> years;
    for (const auto& e : r->elements) {
      auto tokens = textnorm::tokenize(e.value);
      const std::size_t slot = element_slot(e.name);
      if (slot != kNoSlot) fields[slot].push_back(tokens);
      fields[kAnySlot].push_back(std::move(tokens));
      if (e.name == "date") {
        if (auto y = textnorm::extract_year(e.value)) years.push_back(*y);
      }
    }
    if (r->shelf_mark) fields[kAnySlot].push_back(textnorm::tokenize(*r->shelf_mark));
    std::vector<std::string> kinds;
    for (const auto& m : r->marks) {
      if (m.transcription) fields[kAnySlot].push_back(textnorm::tokenize(*m.transcription));
      kinds.emplace_back(to_string(m.kind));
    }
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    std::sort(kinds.begin(), kinds.end());
    kinds.erase(std::unique(kinds.begin(), kinds.end()), kinds.end());

    index->forward_.push_back(std::move(fields));
    index->years_.push_back(std::move(years));
    index->mark_kinds_.push_back(std::move(kinds));
  }
  index->build_postings();
  return index;
}

void SearchIndex::build_postings() {
  for (auto& p : postings_) p.clear();
  library_facet_.clear();
  marktype_facet_.clear();
  for (DocId doc = 0; doc < ids_.size(); ++doc) {
    for (std::size_t slot = 0; slot < kTextFields; ++slot) {
      for (const auto& value : forward_[doc][slot]) {
        for (const auto& token : value) {
          auto& list = postings_[slot][token];
          if (list.empty() || list.back() != doc) list.push_back(doc);
        }
      }
    }
    library_facet_[facet_key(libraries_[doc])].push_back(doc);
    for (const auto& kind : mark_kinds_[doc]) marktype_facet_[facet_key(kind)].push_back(doc);
  }
}

const std::vector<DocId>& SearchIndex::postings(Field field, const std::string& token) const {
  const std::size_t slot = text_slot(field);
  if (slot == kNoSlot) return kEmpty;
  auto it = postings_[slot].find(token);
  return it == postings_[slot].end() ? kEmpty : it->second;
}

std::vector<DocId> SearchIndex::phrase(Field field, const std::vector<std::string>& tokens) const {
  const std::size_t slot = text_slot(field);
  if (slot == kNoSlot || tokens.empty()) return {};
  std::vector<DocId> candidates = postings(field, tokens.front());
  for (std::size_t i = 1; i < tokens.size() && !candidates.empty(); ++i) {
    candidates = intersect(candidates, postings(field, tokens[i]));
  }
  if (tokens.size() == 1) return candidates;
  std::vector<DocId> out;
  for (DocId doc : candidates) {
    const auto& values = forward_[doc][slot];
    if (std::any_of(values.begin(), values.end(),
                    [&](const auto& v) { return contains_sequence(v, tokens); })) {
      out.push_back(doc);
    }
  }
  return out;
}

std::vector<DocId> SearchIndex::year_range(int lo, int hi) const {
  std::vector<DocId> out;
  for (DocId doc = 0; doc < years_.size(); ++doc) {
    const auto& ys = years_[doc];
    auto it = std::lower_bound(ys.begin(), ys.end(), lo);
    if (it != ys.end() && *it <= hi) out.push_back(doc);
  }
  return out;
}

const std::vector<DocId>& SearchIndex::facet(Field field, const std::string& key) const {
  const auto* map = field == Field::Library    ? &library_facet_
                    : field == Field::MarkType ? &marktype_facet_
                                               : nullptr;
  if (!map) return kEmpty;
  auto it = map->find(key);
  return it == map->end() ? kEmpty : it->second;
}

Json SearchIndex::to_json() const {
  Json docs = Json::array();
  for (DocId doc = 0; doc < ids_.size(); ++doc) {
    Json fields = Json::object();
    for (std::size_t slot = 0; slot < kTextFields; ++slot) {
      fields[std::string(kSlotNames[slot])] = forward_[doc][slot];
    }
    docs.push_back({{"record_id", ids_[doc]},
                    {"library", libraries_[doc]},
                    {"years", years_[doc]},
                    {"marks", mark_kinds_[doc]},
                    {"fields", std::move(fields)}});
  }
  return {{"version", 1}, {"documents", std::move(docs)}};
}

std::shared_ptr<const SearchIndex> SearchIndex::from_json(const Json& j) {
  try {
    if (j.at("version").get<int>() != 1) throw ParseError("unsupported index version");
    std::shared_ptr<SearchIndex> index(new SearchIndex());
    for (const auto& d : j.at("documents")) {
      index->ids_.push_back(d.at("record_id").get<std::string>());
      index->libraries_.push_back(d.at("library").get<std::string>());
      index->years_.push_back(d.at("years").get<std::vector<int>>());
      index->mark_kinds_.push_back(d.at("marks").get<std::vector<std::string>>());
      std::array<FieldValues, kTextFields> fields;
      for (std::size_t slot = 0; slot < kTextFields; ++slot) {
        fields[slot] = d.at("fields").at(std::string(kSlotNames[slot])).get<FieldValues>();
      }
      index->forward_.push_back(std::move(fields));
    }
    if (!std::is_sorted(index->ids_.begin(), index->ids_.end())) {
      throw ParseError("index documents are not sorted");
    }
    index->build_postings();
    return index;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("malformed index: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

std::shared_ptr<const SearchIndex> IndexHandle::get() const {
  std::lock_guard lock(mutex_);
  return index_;
}

void IndexHandle::swap(std::shared_ptr<const SearchIndex> index) {
  std::lock_guard lock(mutex_);
  index_.swap(index);
}

std::filesystem::path index_path(const std::filesystem::path& root) {
  return root / "index" / "search-index.json";
}

void save_index(const std::filesystem::path& root, const SearchIndex& index,
                const std::string& fingerprint) {
  const auto path = index_path(root);
  std::filesystem::create_directories(path.parent_path());
  const Json doc = {{"fingerprint", fingerprint}, {"index", index.to_json()}};
  write_file_atomic(path, doc.dump());
}

std::shared_ptr<const SearchIndex> load_index(const std::filesystem::path& root,
                                              const std::string& fingerprint) {
  const auto path = index_path(root);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return nullptr;
  try {
    const Json doc = Json::parse(read_file(path));
    if (doc.at("fingerprint").get<std::string>() != fingerprint) return nullptr;
    return SearchIndex::from_json(doc.at("index"));
  } catch (const std::exception&) {
    return nullptr;
  }
}

// ---------------------------------------------------------------------------

namespace {

class Evaluator {
 public:
  explicit Evaluator(const SearchIndex& index) : index_(index) {}

  std::vector<DocId> eval(const Node& node) const {
    switch (node.kind) {
      case Node::Kind::Term: return index_.postings(Field::Any, node.token);
      case Node::Kind::Fielded: return leaf(node);
      case Node::Kind::Or: {
        std::vector<DocId> acc;
        for (const auto& c : node.children) acc = unite(acc, eval(c));
        return acc;
      }
      case Node::Kind::Not: return subtract(all(), eval(node.children.front()));
      case Node::Kind::And: {
        std::optional<std::vector<DocId>> acc;
        std::vector<DocId> excluded;
        for (const auto& c : node.children) {
          if (c.kind == Node::Kind::Not) {
            excluded = unite(excluded, eval(c.children.front()));
          } else {
            acc = acc ? intersect(*acc, eval(c)) : eval(c);
          }
        }
        return subtract(acc ? *acc : all(), excluded);
      }
    }
    return {};
  }

 private:
  std::vector<DocId> leaf(const Node& node) const {
    if (node.range) return index_.year_range(node.range->lo, node.range->hi);
    if (node.field == Field::Library || node.field == Field::MarkType) {
      return index_.facet(node.field, join_tokens(node.phrase));
    }
    return index_.phrase(node.field, node.phrase);
  }

  std::vector<DocId> all() const {
    std::vector<DocId> out(index_.size());
    for (DocId d = 0; d < out.size(); ++d) out[d] = d;
    return out;
  }

  const SearchIndex& index_;
};

// One scoring key per distinct token of a positive leaf; facets and ranges
// count as a single token each.
struct ScoreKey {
  Field field;
  std::string token;
  std::optional<YearRange> range;

  bool operator<(const ScoreKey& o) const {
    auto r = [](const std::optional<YearRange>& y) {
      return y ? std::pair{y->lo, y->hi} : std::pair{0, -1};
    };
    return std::tie(field, token) < std::tie(o.field, o.token) ||
           (std::tie(field, token) == std::tie(o.field, o.token) && r(range) < r(o.range));
  }
};

void collect_keys(const Node& node, std::set<ScoreKey>& keys) {
  switch (node.kind) {
    case Node::Kind::Not: return;
    case Node::Kind::Term: keys.insert({Field::Any, node.token, std::nullopt}); return;
    case Node::Kind::Fielded:
      if (node.range) {
        keys.insert({Field::Date, "", node.range});
      } else if (node.field == Field::Library || node.field == Field::MarkType) {
        keys.insert({node.field, join_tokens(node.phrase), std::nullopt});
      } else {
        for (const auto& t : node.phrase) keys.insert({node.field, t, std::nullopt});
      }
      return;
    default:
      for (const auto& c : node.children) collect_keys(c, keys);
  }
}

}  // namespace

std::vector<Hit> execute(const SearchIndex& index, const Node& ast) {
  const std::vector<DocId> docs = Evaluator(index).eval(ast);
  std::set<ScoreKey> keys;
  collect_keys(ast, keys);

  std::vector<Hit> hits;
  hits.reserve(docs.size());
  for (DocId doc : docs) {
    int score = 0;
    for (const auto& k : keys) {
      bool hit = false;
      if (k.range) {
        const auto& ys = index.years(doc);
        hit = std::any_of(ys.begin(), ys.end(),
                          [&](int y) { return y >= k.range->lo && y <= k.range->hi; });
      } else if (k.field == Field::Library || k.field == Field::MarkType) {
        const auto& list = index.facet(k.field, k.token);
        hit = std::binary_search(list.begin(), list.end(), doc);
      } else {
        const auto& list = index.postings(k.field, k.token);
        hit = std::binary_search(list.begin(), list.end(), doc);
      }
      score += hit ? 1 : 0;
    }
    hits.push_back({index.record_id(doc), score});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    return a.score != b.score ? a.score > b.score : a.record_id < b.record_id;
  });
  return hits;
}

}  // namespace alp::query
