#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace panolidar {

/// Reads the TOML subset used by config, intrinsics and scene files: comments,
/// `key = value` pairs, `[table]` and `[[array-of-tables]]` headers (dotted names
/// allowed), basic and literal strings, integers, floats, booleans and flat arrays.
/// Throws ConfigError with a line number on anything else.
nlohmann::json parse_toml(std::string_view text);
nlohmann::json load_toml(const std::filesystem::path& path);

}  // namespace panolidar
