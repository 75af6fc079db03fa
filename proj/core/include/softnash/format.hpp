#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace softnash {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Parses a full string as a double; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace softnash
