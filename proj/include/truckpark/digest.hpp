#pragma once

#include <string>
#include <string_view>

namespace truckpark {

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

} // namespace truckpark
