#include "alp/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "alp/error.hpp"
#include "alp/textnorm.hpp"

namespace alp {
namespace {

// Lowercase with '_' and '-' removed, so "DogEar", "dog_ear" and "dog-ear" agree.
std::string squash(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    if (c == '_' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> parse_squashed(std::string_view text, const std::array<Enum, N>& values) {
  const std::string key = squash(text);
  for (Enum v : values) {
    if (squash(to_string(v)) == key) return v;
  }
  return std::nullopt;
}

bool has_control_chars(std::string_view text) {
  return std::any_of(text.begin(), text.end(), [](unsigned char c) {
    return (c < 0x20 && c != '\t' && c != '\n' && c != '\r') || c == 0x7f;
  });
}

}  // namespace

bool is_dc_element_name(std::string_view name) {
  return std::binary_search(kDcElementNames.begin(), kDcElementNames.end(), name);
}

std::string_view to_string(MarkKind kind) {
  switch (kind) {
    case MarkKind::Dedication: return "dedication";
    case MarkKind::Annotation: return "annotation";
    case MarkKind::PriceAnnotation: return "price_annotation";
    case MarkKind::DogEar: return "dog_ear";
    case MarkKind::Bookmark: return "bookmark";
    case MarkKind::Erasure: return "erasure";
  }
  return "annotation";
}

std::optional<MarkKind> parse_mark_kind(std::string_view text) {
  return parse_squashed(text, kMarkKinds);
}

std::string_view to_string(Provider provider) {
  switch (provider) {
    case Provider::GallicaLike: return "gallica_like";
    case Provider::OpenLibraryLike: return "open_library_like";
    case Provider::Fixture: return "fixture";
  }
  return "fixture";
}

std::optional<Provider> parse_provider(std::string_view text) {
  return parse_squashed(text, std::array{Provider::GallicaLike, Provider::OpenLibraryLike,
                                         Provider::Fixture});
}

std::string_view to_string(MatchLevel level) {
  return level == MatchLevel::ExactEdition ? "exact_edition" : "approximate_edition";
}

std::optional<MatchLevel> parse_match_level(std::string_view text) {
  return parse_squashed(text, std::array{MatchLevel::ExactEdition, MatchLevel::ApproximateEdition});
}

std::string_view to_string(Rights rights) {
  switch (rights) {
    case Rights::PublicDomain: return "public_domain";
    case Rights::InCopyright: return "in_copyright";
    case Rights::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Rights> parse_rights(std::string_view text) {
  return parse_squashed(text, std::array{Rights::PublicDomain, Rights::InCopyright, Rights::Unknown});
}

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::MaterialFonds: return "material_fonds";
    case Provenance::Reconstituted: return "reconstituted";
    case Provenance::Inventory: return "inventory";
    case Provenance::SalesCatalog: return "sales_catalog";
  }
  return "material_fonds";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
  return parse_squashed(text, std::array{Provenance::MaterialFonds, Provenance::Reconstituted,
                                         Provenance::Inventory, Provenance::SalesCatalog});
}

std::string_view to_string(AssetKind kind) {
  switch (kind) {
    case AssetKind::DedicationPhoto: return "dedication_photo";
    case AssetKind::AnnotationPhoto: return "annotation_photo";
    case AssetKind::OtherMarkPhoto: return "other_mark_photo";
  }
  return "other_mark_photo";
}

std::optional<AssetKind> parse_asset_kind(std::string_view text) {
  return parse_squashed(text, std::array{AssetKind::DedicationPhoto, AssetKind::AnnotationPhoto,
                                         AssetKind::OtherMarkPhoto});
}

std::vector<std::string> BibRecord::values(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto& e : elements) {
    if (e.name == name) out.push_back(e.value);
  }
  return out;
}

std::optional<std::string> BibRecord::first(std::string_view name) const {
  for (const auto& e : elements) {
    if (e.name == name) return e.value;
  }
  return std::nullopt;
}

bool is_valid_slug(std::string_view slug) {
  return !slug.empty() && std::all_of(slug.begin(), slug.end(), [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool is_valid_record_id(std::string_view record_id) {
  const auto dash = record_id.rfind('-');
  if (dash == std::string_view::npos || record_id.size() - dash - 1 != 6) return false;
  const auto digits = record_id.substr(dash + 1);
  return is_valid_slug(record_id.substr(0, dash)) &&
         std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return c >= '0' && c <= '9'; });
}

bool is_valid_qualifier(std::string_view qualifier) {
  if (qualifier.empty() || qualifier[0] < 'a' || qualifier[0] > 'z') return false;
  return std::all_of(qualifier.begin(), qualifier.end(), [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

bool is_valid_lang_tag(std::string_view tag) {
  static const std::regex pattern("^[A-Za-z]{2,8}(-[A-Za-z0-9]{1,8})*$");
  return std::regex_match(tag.begin(), tag.end(), pattern);
}

bool is_valid_datestamp(std::string_view stamp) {
  static const std::regex pattern("^[0-9]{4}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}Z$");
  return std::regex_match(stamp.begin(), stamp.end(), pattern);
}

std::vector<Violation> validate_record(const BibRecord& record,
                                       const std::set<std::string>& known_libraries) {
  std::vector<Violation> out;
  if (!is_valid_record_id(record.record_id)) {
    out.push_back({"record_id", "must match ^[a-z0-9_]+-[0-9]{6}$"});
  } else if (record_slug(record.record_id) != record.library_slug) {
    out.push_back({"record_id", "slug prefix must equal library_slug"});
  }
  if (!is_valid_slug(record.library_slug)) {
    out.push_back({"library_slug", "must match ^[a-z0-9_]+$"});
  } else if (!known_libraries.contains(record.library_slug)) {
    out.push_back({"library_slug", "unknown library"});
  }

  bool has_title = false;
  for (std::size_t i = 0; i < record.elements.size(); ++i) {
    const auto& e = record.elements[i];
    const std::string field = "elements[" + std::to_string(i) + "]";
    if (!is_dc_element_name(e.name)) {
      out.push_back({field + ".name", "illegal element name '" + e.name + "'"});
    } else if (e.name == "title" && !textnorm::trim(e.value).empty()) {
      has_title = true;
    }
    if (textnorm::trim(e.value).empty()) {
      out.push_back({field + ".value", "must be non-empty"});
    } else if (has_control_chars(e.value)) {
      out.push_back({field + ".value", "must not contain control characters"});
    }
    if (e.qualifier && !is_valid_qualifier(*e.qualifier)) {
      out.push_back({field + ".qualifier", "must match [a-z][a-z0-9_]*"});
    }
    if (e.lang && !is_valid_lang_tag(*e.lang)) {
      out.push_back({field + ".lang", "not a BCP-47 tag"});
    }
  }
  if (!has_title) out.push_back({"elements", "missing title"});

  for (std::size_t i = 0; i < record.marks.size(); ++i) {
    const auto& m = record.marks[i];
    for (const auto& id : m.asset_ids) {
      if (id.rfind(record.record_id + "-a", 0) != 0) {
        out.push_back({"marks[" + std::to_string(i) + "].asset_ids",
                       "asset '" + id + "' does not belong to this record"});
      }
    }
  }
  if (!record.datestamp.empty() && !is_valid_datestamp(record.datestamp)) {
    out.push_back({"datestamp", "must be YYYY-MM-DDThh:mm:ssZ"});
  }
  for (std::size_t i = 0; i < record.surrogates.size(); ++i) {
    const auto& s = record.surrogates[i];
    const std::string field = "surrogates[" + std::to_string(i) + "]";
    if (s.access_url.empty()) out.push_back({field + ".access_url", "must be non-empty"});
    if (s.provider_record_id.empty()) {
      out.push_back({field + ".provider_record_id", "must be non-empty"});
    }
    if (!(s.total_score >= 0.0 && s.total_score <= 1.0)) {
      out.push_back({field + ".total_score", "must lie in [0, 1]"});
    }
  }
  return out;
}

std::vector<Violation> validate_library(const ArtistLibrary& library) {
  std::vector<Violation> out;
  if (!is_valid_slug(library.slug)) out.push_back({"slug", "must match ^[a-z0-9_]+$"});
  if (textnorm::trim(library.artist_name).empty()) {
    out.push_back({"artist_name", "must be non-empty"});
  }
  if (library.latitude.has_value() != library.longitude.has_value()) {
    out.push_back({"coordinates", "latitude and longitude must be given together"});
  }
  if (library.latitude && !(*library.latitude >= -90.0 && *library.latitude <= 90.0)) {
    out.push_back({"latitude", "must lie in [-90, 90]"});
  }
  if (library.longitude && !(*library.longitude >= -180.0 && *library.longitude <= 180.0)) {
    out.push_back({"longitude", "must lie in [-180, 180]"});
  }
  if (library.birth_year && library.death_year && *library.birth_year >= *library.death_year) {
    out.push_back({"birth_year", "must precede death_year"});
  }
  return out;
}

std::string assign_id(std::string_view library_slug, long long existing_max_seq) {
  if (!is_valid_slug(library_slug)) {
    throw PreconditionError("invalid library slug '" + std::string(library_slug) + "'");
  }
  if (existing_max_seq < 0) throw PreconditionError("existing_max_seq must be >= 0");
  if (existing_max_seq >= kMaxSequence) {
    throw SequenceOverflowError("record sequence for '" + std::string(library_slug) +
                                "' exceeds 999999");
  }
  std::string seq = std::to_string(existing_max_seq + 1);
  return std::string(library_slug) + "-" + std::string(6 - seq.size(), '0') + seq;
}

std::optional<int> record_sequence(std::string_view record_id) {
  if (!is_valid_record_id(record_id)) return std::nullopt;
  return std::stoi(std::string(record_id.substr(record_id.size() - 6)));
}

std::string record_slug(std::string_view record_id) {
  const auto dash = record_id.rfind('-');
  if (dash == std::string_view::npos) return {};
  return std::string(record_id.substr(0, dash));
}

}  // namespace alp
