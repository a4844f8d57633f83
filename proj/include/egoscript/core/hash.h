#pragma once

#include <string>
#include <string_view>

namespace egoscript {

/// Lowercase hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

/// First 12 hex digits of the SHA-256 of `bytes`.
std::string hash12(std::string_view bytes);

/// Content-derived identifier of the form "<prefix>-<hash12>".
std::string content_id(std::string_view prefix, std::string_view payload);

}  // namespace egoscript
