#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace gazelearn {

/// Fixed-point with six fractional digits, correctly rounded (ties to even).
std::string format_fixed6(double value);

/// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

/// Escapes a string for inclusion in a JSON document (quotes included).
std::string json_quote(std::string_view text);

bool is_valid_utf8(std::string_view text);

/// 64-bit FNV-1a. Used wherever a stable, platform-independent hash is needed.
std::uint64_t fnv1a64(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace gazelearn
