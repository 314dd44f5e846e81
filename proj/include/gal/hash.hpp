#pragma once

#include <string>
#include <string_view>

namespace gal {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

std::string read_file_bytes(const std::string& path);

} // namespace gal
