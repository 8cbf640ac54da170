#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace morphpiece::unicode {

using CodePoint = char32_t;

struct Decoded {
  CodePoint cp;
  std::size_t length;
};

// Decodes one scalar value at `pos`. Returns nullopt on malformed input,
// overlong forms, surrogates and values above U+10FFFF.
std::optional<Decoded> decode_at(std::string_view text, std::size_t pos);

bool is_valid_utf8(std::string_view text);

// Throws Error(InvalidUtf8) naming the byte offset of the first bad sequence.
void require_utf8(std::string_view text);

void append_utf8(std::string& out, CodePoint cp);

std::size_t codepoint_count(std::string_view valid_utf8);

bool is_letter(CodePoint cp);
bool is_number(CodePoint cp);
bool is_space(CodePoint cp);

}  // namespace morphpiece::unicode
