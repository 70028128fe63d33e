#include "alp/assets.hpp"

#include <algorithm>
#include <cctype>

#include "alp/util.hpp"

namespace alp::assets {

namespace fs = std::filesystem;

std::string_view to_string(Variant variant) {
  return variant == Variant::Original ? "original" : "derivative";
}

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "original") return Variant::Original;
  if (text == "derivative") return Variant::Derivative;
  return std::nullopt;
}

Decision resolve_variant(const AssetRecord& asset, Variant requested) {
  if (asset.rights == Rights::PublicDomain) {
    if (requested == Variant::Original) return Allowed{asset.original};
    return asset.derivative ? Decision{Allowed{*asset.derivative}} : Decision{Allowed{asset.original}};
  }
  if (requested == Variant::Original) return Denied{"rights"};
  if (!asset.derivative) return Denied{"no derivative"};
  return Allowed{*asset.derivative};
}

std::string media_type_for(const fs::path& file) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".tif" || ext == ".tiff") return "image/tiff";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "application/octet-stream";
}

AssetRecord register_asset(StoreWriter& writer, const Registration& reg) {
  const std::string slug = record_slug(reg.record_id);
  auto records = writer.read(slug);
  auto rec = std::find_if(records.begin(), records.end(),
                          [&](const BibRecord& r) { return r.record_id == reg.record_id; });
  if (rec == records.end()) throw NotFoundError("unknown record '" + reg.record_id + "'");
  if (!fs::is_regular_file(reg.original)) throw NotFoundError("original file not found: " + reg.original.string());
  if (reg.derivative && !fs::is_regular_file(*reg.derivative)) {
    throw NotFoundError("derivative file not found: " + reg.derivative->string());
  }
  if (reg.rights != Rights::PublicDomain && !reg.derivative) {
    throw PreconditionError("an asset that is not in the public domain needs a derivative");
  }
  if (reg.mark && *reg.mark >= rec->marks.size()) {
    throw NotFoundError("record " + reg.record_id + " has no mark #" + std::to_string(*reg.mark));
  }

  auto assets = writer.read_assets(slug);
  const std::string prefix = reg.record_id + "-a";
  int next = 1;
  for (const auto& a : assets) {
    if (a.asset_id.rfind(prefix, 0) != 0) continue;
    try {
      next = std::max(next, std::stoi(a.asset_id.substr(prefix.size())) + 1);
    } catch (const std::exception&) {
    }
  }

  AssetRecord asset;
  asset.asset_id = prefix + std::to_string(next);
  asset.record_id = reg.record_id;
  asset.kind = reg.kind;
  asset.rights = reg.rights;
  asset.media_type = media_type_for(reg.original);

  const fs::path dir = store_paths::assets_dir(writer.root(), slug);
  fs::create_directories(dir);
  const auto store = [&](const fs::path& from, const char* variant) {
    const fs::path to = dir / (asset.asset_id + "." + variant + from.extension().string());
    write_file_atomic(to, read_file(from));
    return fs::relative(to, writer.root()).generic_string();
  };
  asset.original = store(reg.original, "original");
  if (reg.derivative) asset.derivative = store(*reg.derivative, "derivative");

  assets.push_back(asset);
  writer.write_assets(slug, assets);
  if (reg.mark) {
    rec->marks[*reg.mark].asset_ids.push_back(asset.asset_id);
    writer.write(slug, {*rec});
  }
  return asset;
}

}  // namespace alp::assets
