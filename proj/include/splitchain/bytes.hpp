#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace splitchain {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_text(ByteView b) { return std::string(b.begin(), b.end()); }

// libsodium must be initialised once per process before any primitive runs.
void ensure_sodium();

}  // namespace splitchain
