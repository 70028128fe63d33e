#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace alp {

std::string sha256_hex(std::string_view data);

// RFC 4648 base64url without padding.
std::string base64url_encode(std::string_view data);
std::optional<std::string> base64url_decode(std::string_view text);

// Returns the current UTC time as YYYY-MM-DDThh:mm:ssZ.
using Clock = std::function<std::string()>;
std::string utc_now();
std::string format_utc(std::chrono::system_clock::time_point t);

std::string read_file(const std::filesystem::path& path);
// Writes via a sibling temporary file, fsync and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string percent_encode(std::string_view text);

}  // namespace alp
