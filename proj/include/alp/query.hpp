#pragma once

// Keyword and fielded boolean search over an in-memory inverted index.
//
// Advanced grammar (keywords are upper case, field names are not):
//   or      := and ("OR" and)*
//   and     := not (("AND")? not)*          juxtaposition means AND
//   not     := "NOT" not | primary
//   primary := "(" or ")" | FIELD ":" value | word | quoted
//   value   := word | quoted | "[" YEAR "TO" YEAR "]"
//   FIELD   := title | creator | date | publisher | subject | language
//            | library | marktype | any

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "alp/catalog.hpp"
#include "alp/error.hpp"

namespace alp::query {

enum class Field { Title, Creator, Date, Publisher, Subject, Language, Library, MarkType, Any };
inline constexpr std::size_t kFieldCount = 9;

std::string_view to_string(Field field);
// Case-insensitive.
std::optional<Field> parse_field(std::string_view name);

enum class Mode { Simple, Advanced };

struct YearRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const YearRange&, const YearRange&) = default;
};

struct Node {
  enum class Kind { Or, And, Not, Term, Fielded };

  Kind kind = Kind::Term;
  std::vector<Node> children;           // Or, And: operands; Not: exactly one
  std::string token;                    // Term: folded token, field any
  Field field = Field::Any;             // Fielded
  std::vector<std::string> phrase;      // Fielded: ordered folded tokens
  std::optional<YearRange> range;       // Fielded on date

  static Node make_or(std::vector<Node> children);
  static Node make_and(std::vector<Node> children);
  static Node make_not(Node child);
  static Node make_term(std::string token);
  static Node make_phrase(Field field, std::vector<std::string> tokens);
  static Node make_range(int lo, int hi);

  friend bool operator==(const Node&, const Node&) = default;
};

class QueryError : public ParseError {
 public:
  QueryError(const std::string& message, std::size_t offset)
      : ParseError(message + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset),
        reason_(message) {}
  std::size_t offset() const { return offset_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

// Throws QueryError for syntax errors, unknown fields, pure negation and
// inverted ranges.
Node parse_query(std::string_view input, Mode mode);

// Canonical text that parses back (Advanced mode) to an equal tree.
std::string to_query_string(const Node& node);

// ---------------------------------------------------------------------------

using DocId = std::uint32_t;

struct Hit {
  std::string record_id;
  int score = 0;  // number of distinct positive leaves the record satisfies

  friend bool operator==(const Hit&, const Hit&) = default;
};

// Immutable once built; share it through std::shared_ptr<const SearchIndex>.
class SearchIndex {
 public:
  static std::shared_ptr<const SearchIndex> build(const std::vector<BibRecord>& records);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& record_ids() const { return ids_; }
  const std::string& record_id(DocId doc) const { return ids_[doc]; }

  // Sorted documents whose `field` contains `token`.
  const std::vector<DocId>& postings(Field field, const std::string& token) const;
  // Sorted documents containing the token sequence inside a single value of `field`.
  std::vector<DocId> phrase(Field field, const std::vector<std::string>& tokens) const;
  std::vector<DocId> year_range(int lo, int hi) const;
  // Facet keys are the concatenated tokens of the slug or mark kind ("dogear").
  const std::vector<DocId>& facet(Field field, const std::string& key) const;

  const std::vector<int>& years(DocId doc) const { return years_[doc]; }
  const std::string& library_of(DocId doc) const { return libraries_[doc]; }
  const std::vector<std::string>& mark_kinds_of(DocId doc) const { return mark_kinds_[doc]; }

  nlohmann::json to_json() const;
  static std::shared_ptr<const SearchIndex> from_json(const nlohmann::json& j);

 private:
  // Per document, per text field: token lists of each element value.
  using FieldValues = std::vector<std::vector<std::string>>;
  // title, creator, publisher, subject, language, any. Dates are searched by
  // year only; their text is reachable through `any`.
  static constexpr std::size_t kTextFields = 6;

  SearchIndex() = default;
  void build_postings();
  static std::size_t text_slot(Field field);

  std::vector<std::string> ids_;
  std::vector<std::string> libraries_;
  std::vector<std::vector<std::string>> mark_kinds_;
  std::vector<std::array<FieldValues, kTextFields>> forward_;
  std::vector<std::vector<int>> years_;

  std::array<std::unordered_map<std::string, std::vector<DocId>>, kTextFields> postings_;
  std::unordered_map<std::string, std::vector<DocId>> library_facet_;
  std::unordered_map<std::string, std::vector<DocId>> marktype_facet_;
};

// Holds the current index; rebuilds are published with a single swap so that
// readers always see either the old or the new index in full.
class IndexHandle {
 public:
  std::shared_ptr<const SearchIndex> get() const;
  void swap(std::shared_ptr<const SearchIndex> index);

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const SearchIndex> index_;
};

// Persisted form under <store root>/index/search-index.json, tagged with the
// snapshot fingerprint it was built from.
std::filesystem::path index_path(const std::filesystem::path& root);
void save_index(const std::filesystem::path& root, const SearchIndex& index,
                const std::string& fingerprint);
// nullptr when the file is missing, unreadable or built from other content.
std::shared_ptr<const SearchIndex> load_index(const std::filesystem::path& root,
                                              const std::string& fingerprint);

// Ranked by descending score, ties by ascending record_id.
std::vector<Hit> execute(const SearchIndex& index, const Node& ast);

// Concatenated folded tokens, the key used by the library and marktype facets.
std::string facet_key(std::string_view text);

}  // namespace alp::query
