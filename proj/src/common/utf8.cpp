// Copyright 2026 The partext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "partext/utf8.hpp"

#include <algorithm>
#include <cctype>

#include "partext/error.hpp"

namespace partext::utf8 {

std::optional<DecodedChar> decode_at(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) return std::nullopt;
  const auto b0 = static_cast<unsigned char>(text[offset]);
  if (b0 < 0x80) return DecodedChar{b0, offset, 1};

  std::size_t len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2; cp = b0 & 0x1F; min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3; cp = b0 & 0x0F; min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4; cp = b0 & 0x07; min = 0x10000;
  } else {
    return std::nullopt;
  }
  if (offset + len > text.size()) return std::nullopt;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(text[offset + i]);
    if ((b & 0xC0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return std::nullopt;
  return DecodedChar{cp, offset, len};
}

std::optional<std::size_t> find_invalid(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = decode_at(text, i);
    if (!c) return i;
    i += c->length;
  }
  return std::nullopt;
}

std::vector<DecodedChar> decode(std::string_view text) {
  std::vector<DecodedChar> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = decode_at(text, i);
    if (!c) {
      throw Error(ErrorCode::InvalidEncoding,
                  "invalid UTF-8 at byte " + std::to_string(i), i);
    }
    out.push_back(*c);
    i += c->length;
  }
  return out;
}

std::u32string to_u32(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  for (const auto& c : decode(text)) out.push_back(c.code_point);
  return out;
}

void append(std::string& out, char32_t cp) {
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

std::string from_u32(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) append(out, cp);
  return out;
}

bool is_boundary(std::string_view text, std::size_t offset) {
  if (offset == 0 || offset == text.size()) return true;
  if (offset > text.size()) return false;
  return (static_cast<unsigned char>(text[offset]) & 0xC0) != 0x80;
}

std::string to_utf8(std::string_view bytes, Encoding encoding) {
  if (encoding == Encoding::utf8) {
    if (auto bad = find_invalid(bytes)) {
      throw Error(ErrorCode::InvalidEncoding,
                  "invalid UTF-8 at byte " + std::to_string(*bad), *bad);
    }
    return std::string(bytes);
  }
  std::string out;
  out.reserve(bytes.size() + bytes.size() / 4);
  for (char c : bytes) append(out, static_cast<unsigned char>(c));
  return out;
}

std::optional<Encoding> parse_encoding(std::string_view label) {
  std::string lower;
  for (char c : label) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "utf-8" || lower == "utf8") return Encoding::utf8;
  if (lower == "latin-1" || lower == "latin1" || lower == "iso-8859-1") return Encoding::latin1;
  return std::nullopt;
}

bool is_whitespace(char32_t cp) noexcept {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

namespace {

struct Range {
  char32_t first;
  char32_t last;
};

// Blocks where upper- and lowercase letters alternate, uppercase on the even
// code point.
constexpr Range kAlternatingEvenUpper[] = {
    {0x0100, 0x012F}, {0x0132, 0x0137}, {0x014A, 0x0177}, {0x01DE, 0x01EF},
    {0x01F8, 0x024F}, {0x0460, 0x0481}, {0x048A, 0x04BF}, {0x04D0, 0x052F},
    {0x1E00, 0x1E95}, {0x1EA0, 0x1EFF},
};

// Same, uppercase on the odd code point.
constexpr Range kAlternatingOddUpper[] = {
    {0x0139, 0x0148}, {0x0179, 0x017E}, {0x04C1, 0x04CE},
};

constexpr Range kUppercase[] = {
    {0x0041, 0x005A}, {0x00C0, 0x00D6}, {0x00D8, 0x00DE}, {0x0386, 0x0386},
    {0x0388, 0x038F}, {0x0391, 0x03A1}, {0x03A3, 0x03AB}, {0x0400, 0x042F},
    {0x0531, 0x0556}, {0x10A0, 0x10C5}, {0x1F08, 0x1F0F}, {0x1F18, 0x1F1D},
    {0x1F28, 0x1F2F}, {0x1F38, 0x1F3F}, {0x1F48, 0x1F4D}, {0x1F68, 0x1F6F},
    {0xFF21, 0xFF3A},
};

constexpr Range kDigits[] = {
    {0x0030, 0x0039}, {0x0660, 0x0669}, {0x06F0, 0x06F9}, {0x0966, 0x096F},
    {0x09E6, 0x09EF}, {0x0E50, 0x0E59}, {0xFF10, 0xFF19},
};

constexpr Range kLetters[] = {
    {0x0041, 0x005A}, {0x0061, 0x007A}, {0x00AA, 0x00AA}, {0x00B5, 0x00B5},
    {0x00BA, 0x00BA}, {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02AF},
    {0x0370, 0x03FF}, {0x0400, 0x052F}, {0x0531, 0x0587}, {0x05D0, 0x05EA},
    {0x0620, 0x064A}, {0x0671, 0x06D3}, {0x0904, 0x0939}, {0x0E01, 0x0E30},
    {0x10A0, 0x10FF}, {0x1E00, 0x1FFF}, {0x3041, 0x30FF}, {0x3400, 0x4DBF},
    {0x4E00, 0x9FFF}, {0xAC00, 0xD7AF}, {0xFF21, 0xFF3A}, {0xFF41, 0xFF5A},
};

template <std::size_t N>
bool in_ranges(const Range (&ranges)[N], char32_t cp) noexcept {
  return std::any_of(std::begin(ranges), std::end(ranges),
                     [cp](const Range& r) { return cp >= r.first && cp <= r.last; });
}

}  // namespace

bool is_uppercase(char32_t cp) noexcept {
  if (in_ranges(kUppercase, cp)) return true;
  for (const auto& r : kAlternatingEvenUpper) {
    if (cp >= r.first && cp <= r.last) return (cp % 2) == 0;
  }
  for (const auto& r : kAlternatingOddUpper) {
    if (cp >= r.first && cp <= r.last) return (cp % 2) == 1;
  }
  return cp == 0x0130 || cp == 0x0178;
}

bool is_digit(char32_t cp) noexcept { return in_ranges(kDigits, cp); }

bool is_letter_or_digit(char32_t cp) noexcept {
  return in_ranges(kLetters, cp) || is_digit(cp);
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = decode_at(text, i);
    if (!c) {
      throw Error(ErrorCode::InvalidEncoding,
                  "invalid UTF-8 at byte " + std::to_string(i), i);
    }
    if (is_whitespace(c->code_point)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.append(text.substr(i, c->length));
    }
    i += c->length;
  }
  return out;
}

std::string escape_xml(std::string_view text, bool attribute) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace partext::utf8
