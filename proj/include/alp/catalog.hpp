#pragma once

// Domain types shared by every module: Dublin Core elements, records,
// libraries, reading marks and digital surrogates.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace alp {

// The fifteen Dublin Core element names, in alphabetical order.
inline constexpr std::array<std::string_view, 15> kDcElementNames = {
    "contributor", "coverage", "creator",  "date",    "description",
    "format",      "identifier", "language", "publisher", "relation",
    "rights",      "source",   "subject",  "title",   "type"};

bool is_dc_element_name(std::string_view name);

// One element/qualifier/value triple. `name` is kept as text so that a
// record carrying an illegal element can still be represented and reported
// by validate_record().
struct DcElement {
  std::string name;
  std::optional<std::string> qualifier;
  std::string value;
  std::optional<std::string> lang;

  friend bool operator==(const DcElement&, const DcElement&) = default;
  friend auto operator<=>(const DcElement&, const DcElement&) = default;
};

enum class MarkKind { Dedication, Annotation, PriceAnnotation, DogEar, Bookmark, Erasure };

inline constexpr std::array<MarkKind, 6> kMarkKinds = {
    MarkKind::Dedication, MarkKind::Annotation, MarkKind::PriceAnnotation,
    MarkKind::DogEar,     MarkKind::Bookmark,   MarkKind::Erasure};

// snake_case wire name ("price_annotation").
std::string_view to_string(MarkKind kind);
// Accepts the wire name or the CamelCase spelling, case-insensitively.
std::optional<MarkKind> parse_mark_kind(std::string_view text);

struct ReadingMark {
  MarkKind kind = MarkKind::Annotation;
  std::string locus;
  std::optional<std::string> transcription;
  std::vector<std::string> asset_ids;

  friend bool operator==(const ReadingMark&, const ReadingMark&) = default;
};

enum class Provider { GallicaLike, OpenLibraryLike, Fixture };
std::string_view to_string(Provider provider);
std::optional<Provider> parse_provider(std::string_view text);

enum class MatchLevel { ExactEdition, ApproximateEdition };
std::string_view to_string(MatchLevel level);
std::optional<MatchLevel> parse_match_level(std::string_view text);

struct DigitalSurrogate {
  Provider provider = Provider::Fixture;
  std::string provider_record_id;
  std::string access_url;
  MatchLevel match_level = MatchLevel::ApproximateEdition;
  double total_score = 0.0;

  friend bool operator==(const DigitalSurrogate&, const DigitalSurrogate&) = default;
};

enum class Rights { PublicDomain, InCopyright, Unknown };
std::string_view to_string(Rights rights);
std::optional<Rights> parse_rights(std::string_view text);

struct BibRecord {
  std::string record_id;
  std::string library_slug;
  std::vector<DcElement> elements;
  std::optional<std::string> shelf_mark;
  std::vector<ReadingMark> marks;
  std::vector<DigitalSurrogate> surrogates;
  Rights rights = Rights::Unknown;
  // UTC, YYYY-MM-DDThh:mm:ssZ; set by the store writer.
  std::string datestamp;

  // Values of every element named `name`, in stored order.
  std::vector<std::string> values(std::string_view name) const;
  // First value of `name`, if any.
  std::optional<std::string> first(std::string_view name) const;

  friend bool operator==(const BibRecord&, const BibRecord&) = default;
};

enum class Provenance { MaterialFonds, Reconstituted, Inventory, SalesCatalog };
std::string_view to_string(Provenance provenance);
std::optional<Provenance> parse_provenance(std::string_view text);

struct ArtistLibrary {
  std::string slug;
  std::string artist_name;
  std::optional<int> birth_year;
  std::optional<int> death_year;
  Provenance provenance = Provenance::MaterialFonds;
  std::string holding_site;
  std::optional<double> latitude;
  std::optional<double> longitude;
  std::string description;

  bool located() const { return latitude.has_value() && longitude.has_value(); }

  friend bool operator==(const ArtistLibrary&, const ArtistLibrary&) = default;
};

enum class AssetKind { DedicationPhoto, AnnotationPhoto, OtherMarkPhoto };
std::string_view to_string(AssetKind kind);
std::optional<AssetKind> parse_asset_kind(std::string_view text);

// A photograph of a reading mark. Paths are relative to the store root.
struct AssetRecord {
  std::string asset_id;  // "<record_id>-a<seq>"
  std::string record_id;
  AssetKind kind = AssetKind::OtherMarkPhoto;
  Rights rights = Rights::Unknown;
  std::string original;
  std::optional<std::string> derivative;
  std::string media_type = "application/octet-stream";

  friend bool operator==(const AssetRecord&, const AssetRecord&) = default;
};

struct Violation {
  std::string field;
  std::string rule;

  friend bool operator==(const Violation&, const Violation&) = default;
};

bool is_valid_slug(std::string_view slug);
bool is_valid_record_id(std::string_view record_id);
bool is_valid_qualifier(std::string_view qualifier);
bool is_valid_lang_tag(std::string_view tag);
bool is_valid_datestamp(std::string_view stamp);

// Never throws; returns an empty list iff the record satisfies every invariant.
std::vector<Violation> validate_record(const BibRecord& record,
                                       const std::set<std::string>& known_libraries);
std::vector<Violation> validate_library(const ArtistLibrary& library);

inline constexpr int kMaxSequence = 999999;

// "<slug>-<max_seq + 1, six digits>". Throws SequenceOverflowError past 999999
// and PreconditionError for a negative sequence or malformed slug.
std::string assign_id(std::string_view library_slug, long long existing_max_seq);

// Numeric suffix of a well-formed record id.
std::optional<int> record_sequence(std::string_view record_id);
// Slug prefix of a record id (everything before the last '-').
std::string record_slug(std::string_view record_id);

}  // namespace alp
