#include "splitchain/numeric_text.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "splitchain/error.hpp"

namespace splitchain {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "configuration";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::NumericInput: return "numeric-input";
    case ErrorKind::Label: return "label";
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Ingestion: return "ingestion";
    case ErrorKind::Integrity: return "integrity";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::Authorization: return "authorization";
    case ErrorKind::Authentication: return "authentication";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Key: return "key";
    case ErrorKind::Join: return "join";
    case ErrorKind::Io: return "io";
    case ErrorKind::State: return "state";
  }
  return "unknown";
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) fail(ErrorKind::NumericInput, "cannot format value");
  return std::string(buf.data(), end);
}

std::optional<double> parse_double(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  const char* first = t.data();
  if (*first == '+') ++first;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::string trim(std::string_view text) {
  const auto* ws = " \t\r\n";
  auto b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = text.find_last_not_of(ws);
  return std::string(text.substr(b, e - b + 1));
}

std::string to_hex(const unsigned char* data, std::size_t size) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(size * 2, '0');
  for (std::size_t i = 0; i < size; ++i) {
    out[2 * i] = digits[data[i] >> 4];
    out[2 * i + 1] = digits[data[i] & 0xf];
  }
  return out;
}

std::optional<std::string> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::string out(hex.size() / 2, '\0');
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<char>((hi << 4) | lo);
  }
  return out;
}

}  // namespace splitchain
