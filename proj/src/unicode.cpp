#include "morphpiece/unicode.hpp"

#include <algorithm>
#include <span>

#include "morphpiece/error.hpp"

namespace morphpiece::unicode {
namespace {

struct CodepointRange {
  CodePoint lo;
  CodePoint hi;
};

#include "unicode_tables.inc"

bool in_ranges(std::span<const CodepointRange> ranges, CodePoint cp) {
  auto it = std::upper_bound(ranges.begin(), ranges.end(), cp,
                             [](CodePoint value, const CodepointRange& r) { return value < r.lo; });
  if (it == ranges.begin()) return false;
  --it;
  return cp <= it->hi;
}

}  // namespace

std::optional<Decoded> decode_at(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return std::nullopt;
  const auto b0 = static_cast<unsigned char>(text[pos]);
  if (b0 < 0x80) return Decoded{b0, 1};

  std::size_t len = 0;
  CodePoint cp = 0;
  CodePoint min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    return std::nullopt;
  }
  if (pos + len > text.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[pos + i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return Decoded{cp, len};
}

bool is_valid_utf8(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto d = decode_at(text, pos);
    if (!d) return false;
    pos += d->length;
  }
  return true;
}

void require_utf8(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto d = decode_at(text, pos);
    if (!d) {
      throw Error(ErrorCode::InvalidUtf8, "malformed sequence at byte " + std::to_string(pos));
    }
    pos += d->length;
  }
}

void append_utf8(std::string& out, CodePoint cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::size_t codepoint_count(std::string_view valid_utf8) {
  return static_cast<std::size_t>(std::count_if(valid_utf8.begin(), valid_utf8.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool is_letter(CodePoint cp) { return in_ranges(kLetterRanges, cp); }
bool is_number(CodePoint cp) { return in_ranges(kNumberRanges, cp); }
bool is_space(CodePoint cp) { return in_ranges(kSpaceRanges, cp); }

}  // namespace morphpiece::unicode
