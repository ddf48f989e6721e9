#include "xling/utf8.hpp"

namespace xling::utf8 {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xc0U) == 0x80U; }

// Returns the length of a valid sequence starting at pos, or 0 if invalid.
std::size_t sequence_length(std::string_view text, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(text[pos]);
  std::size_t len = 0;
  if (lead < 0x80U) {
    return 1;
  } else if ((lead & 0xe0U) == 0xc0U) {
    len = 2;
    if (lead < 0xc2U) return 0;  // overlong
  } else if ((lead & 0xf0U) == 0xe0U) {
    len = 3;
  } else if ((lead & 0xf8U) == 0xf0U) {
    len = 4;
    if (lead > 0xf4U) return 0;  // beyond U+10FFFF
  } else {
    return 0;
  }
  if (pos + len > text.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    if (!is_continuation(static_cast<unsigned char>(text[pos + i]))) return 0;
  }
  return len;
}

}  // namespace

std::vector<std::string> chunks(std::string_view text) {
  std::vector<std::string> out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t len = sequence_length(text, pos);
    if (len == 0) len = 1;
    out.emplace_back(text.substr(pos, len));
    pos += len;
  }
  return out;
}

bool is_valid(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t len = sequence_length(text, pos);
    if (len == 0) return false;
    pos += len;
  }
  return true;
}

}  // namespace xling::utf8
