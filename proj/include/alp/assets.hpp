#pragma once

// Reading-mark photographs and the rule deciding which variant may be
// served. Originals of anything not in the public domain are never served;
// Unknown rights count as in copyright.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "alp/catalog.hpp"
#include "alp/store.hpp"

namespace alp::assets {

enum class Variant { Original, Derivative };
std::string_view to_string(Variant variant);
std::optional<Variant> parse_variant(std::string_view text);

struct Allowed {
  std::string path;  // relative to the store root
  friend bool operator==(const Allowed&, const Allowed&) = default;
};

struct Denied {
  std::string reason;  // "rights" or "no derivative"
  friend bool operator==(const Denied&, const Denied&) = default;
};

using Decision = std::variant<Allowed, Denied>;

// Pure function of (rights, requested, variants).
Decision resolve_variant(const AssetRecord& asset, Variant requested);

std::string media_type_for(const std::filesystem::path& file);

struct Registration {
  std::string record_id;
  AssetKind kind = AssetKind::OtherMarkPhoto;
  Rights rights = Rights::Unknown;
  std::filesystem::path original;
  std::optional<std::filesystem::path> derivative;
  // Index into the record's marks; the new asset id is appended to that mark.
  std::optional<std::size_t> mark;
};

// Copies the files into collections/<slug>/assets/ and appends the asset.
// The id is "<record_id>-a<n>", n one past the record's highest asset.
// Throws NotFoundError (record, files, mark) and PreconditionError when a
// non-public asset comes without a derivative.
AssetRecord register_asset(StoreWriter& writer, const Registration& registration);

}  // namespace alp::assets
