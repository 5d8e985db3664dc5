#pragma once

// Shortest round-trip decimal rendering and strict parsing of numbers.
// Everything that crosses a file or the fabric goes through these so that
// a write/read cycle reproduces the exact bits.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace splitchain {

std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

std::string trim(std::string_view text);

std::string to_hex(const unsigned char* data, std::size_t size);
std::optional<std::string> from_hex(std::string_view hex);

}  // namespace splitchain
