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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace partext::utf8 {

struct DecodedChar {
  char32_t code_point;
  std::size_t offset;  // byte offset of the first code unit
  std::size_t length;  // number of code units
};

/// Decodes one code point at `offset`. Returns nullopt on an invalid or
/// truncated sequence, overlong forms and surrogates included.
std::optional<DecodedChar> decode_at(std::string_view text, std::size_t offset);

/// Offset of the first invalid byte, or nullopt when `text` is valid UTF-8.
std::optional<std::size_t> find_invalid(std::string_view text);

inline bool is_valid(std::string_view text) { return !find_invalid(text); }

/// Throws Error(InvalidEncoding) with the failing offset.
std::vector<DecodedChar> decode(std::string_view text);

std::u32string to_u32(std::string_view text);
void append(std::string& out, char32_t cp);
std::string from_u32(std::u32string_view text);

/// True when `offset` does not fall inside a multi-byte sequence.
bool is_boundary(std::string_view text, std::size_t offset);

enum class Encoding { utf8, latin1 };

/// Converts labelled input to UTF-8; Latin-1 maps bytes 1:1 onto U+0000..U+00FF.
std::string to_utf8(std::string_view bytes, Encoding encoding);
std::optional<Encoding> parse_encoding(std::string_view label);

bool is_whitespace(char32_t cp) noexcept;
bool is_uppercase(char32_t cp) noexcept;
bool is_digit(char32_t cp) noexcept;
bool is_letter_or_digit(char32_t cp) noexcept;

/// Collapses every run of Unicode whitespace into one space and trims both
/// ends. Input must be valid UTF-8.
std::string normalize_whitespace(std::string_view text);

/// Escapes &, <, > and, for attribute values, the double quote. CR is
/// written as a character reference so that parsers keep it.
std::string escape_xml(std::string_view text, bool attribute = false);

}  // namespace partext::utf8
