#pragma once

#include <json.hpp>

#include "alp/catalog.hpp"

// JSON encodings of the catalog types, shared by the store files and the
// HTTP API. Absent optionals are omitted; decoders throw ParseError.
namespace alp::json_codec {

using Json = nlohmann::json;

Json to_json(const DcElement& element);
Json to_json(const ReadingMark& mark);
Json to_json(const DigitalSurrogate& surrogate);
Json to_json(const BibRecord& record);
Json to_json(const ArtistLibrary& library);
Json to_json(const AssetRecord& asset);

DcElement element_from_json(const Json& j);
ReadingMark mark_from_json(const Json& j);
DigitalSurrogate surrogate_from_json(const Json& j);
BibRecord record_from_json(const Json& j);
ArtistLibrary library_from_json(const Json& j);
AssetRecord asset_from_json(const Json& j);

}  // namespace alp::json_codec
