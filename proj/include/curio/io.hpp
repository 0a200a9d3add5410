#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace curio::io {

/// Throws IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Throws ParseError naming `origin`.
nlohmann::json parse_json(std::string_view text, const std::string& origin);

/// Pretty-printed, key-sorted, trailing newline. The on-disk form of every
/// pipeline artifact.
std::string pretty(const nlohmann::json& doc);

/// Single-line form used for HTTP payloads. Invalid UTF-8 is replaced.
std::string compact(const nlohmann::json& doc);

}  // namespace curio::io
