#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace carbonsched {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// Whole file as bytes. Throws DataError naming the path when unreadable.
std::string read_file(const std::filesystem::path& path);

}  // namespace carbonsched
