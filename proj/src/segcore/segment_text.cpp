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

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <regex>

#include "partext/error.hpp"
#include "partext/segcore.hpp"
#include "partext/utf8.hpp"
#include "segcore_internal.hpp"

namespace partext {

namespace detail {

std::string decode_character_references(std::string_view text) {
  static constexpr std::array<std::pair<std::string_view, char32_t>, 6> kNamed{{
      {"amp", U'&'}, {"lt", U'<'}, {"gt", U'>'}, {"quot", U'"'}, {"apos", U'\''}, {"nbsp", 0xA0},
  }};
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(text[i++]);
      continue;
    }
    const auto name = text.substr(i + 1, semi - i - 1);
    std::optional<char32_t> cp;
    if (!name.empty() && name[0] == '#') {
      const bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
      const auto digits = name.substr(hex ? 2 : 1);
      char32_t value = 0;
      bool ok = !digits.empty();
      for (char c : digits) {
        int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                : hex && std::isxdigit(static_cast<unsigned char>(c))
                    ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                    : -1;
        if (d < 0 || value > 0x10FFFF) { ok = false; break; }
        value = value * (hex ? 16 : 10) + static_cast<char32_t>(d);
      }
      if (ok && value <= 0x10FFFF && !(value >= 0xD800 && value <= 0xDFFF)) cp = value;
    } else {
      for (const auto& [n, v] : kNamed) {
        if (n == name) cp = v;
      }
    }
    if (!cp) {
      out.push_back(text[i++]);
      continue;
    }
    utf8::append(out, *cp);
    i = semi + 1;
  }
  return out;
}

}  // namespace detail

namespace {

enum class CharClass : std::uint8_t { content, markup, separator };

constexpr std::u32string_view kClosingPunctuation = U"\"')]}»”’」』";

// Character-level view shared by the plain-text and HTML segmenters.
class Scanner {
 public:
  Scanner(std::string_view source, const std::vector<Span>& markup, const SegmentationPolicy& policy)
      : source_(source), policy_(policy), chars_(utf8::decode(source)), classes_(chars_.size()) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < chars_.size(); ++i) {
      const auto off = chars_[i].offset;
      while (m < markup.size() && markup[m].end <= off) ++m;
      if (m < markup.size() && markup[m].contains(off)) {
        classes_[i] = CharClass::markup;
      } else if (policy.honor_markup && chars_[i].code_point == policy.separator) {
        classes_[i] = CharClass::separator;
        separators_.push_back({off, off + chars_[i].length});
      }
    }
  }

  const std::vector<Span>& separators() const { return separators_; }

  std::size_t index_of(std::size_t byte_offset) const {
    auto it = std::lower_bound(chars_.begin(), chars_.end(), byte_offset,
                               [](const utf8::DecodedChar& c, std::size_t off) { return c.offset < off; });
    return static_cast<std::size_t>(it - chars_.begin());
  }

  // Char index range of the bytes [b, e).
  std::pair<std::size_t, std::size_t> range(Span s) const { return {index_of(s.begin), index_of(s.end)}; }

  bool blank(std::size_t i) const {
    return classes_[i] == CharClass::markup || utf8::is_whitespace(chars_[i].code_point);
  }

  bool has_content(std::size_t lo, std::size_t hi) const {
    for (std::size_t i = lo; i < hi; ++i) {
      if (classes_[i] == CharClass::content && !utf8::is_whitespace(chars_[i].code_point)) return true;
    }
    return false;
  }

  std::optional<Span> trimmed(std::size_t lo, std::size_t hi) const {
    while (lo < hi && blank(lo)) ++lo;
    while (hi > lo && blank(hi - 1)) --hi;
    if (!has_content(lo, hi)) return std::nullopt;
    return Span{chars_[lo].offset, chars_[hi - 1].offset + chars_[hi - 1].length};
  }

  std::vector<Segment> sentences(Span paragraph) const {
    const auto [lo, hi] = range(paragraph);
    std::vector<std::size_t> content;
    for (std::size_t i = lo; i < hi; ++i) {
      if (classes_[i] == CharClass::content) content.push_back(i);
    }
    auto cp = [&](std::size_t k) { return chars_[content[k]].code_point; };
    auto is_indicator = [&](char32_t c) {
      return policy_.sentence_indicators.find(c) != std::u32string::npos;
    };

    // Each cut is (char index just past the terminator, char index of the next start).
    std::vector<std::pair<std::size_t, std::size_t>> cuts;
    bool terminated = false;
    std::size_t k = 0;
    const std::size_t n = content.size();
    while (k < n) {
      if (!is_indicator(cp(k))) {
        ++k;
        continue;
      }
      std::size_t j = k;
      while (j < n && (is_indicator(cp(j)) || kClosingPunctuation.find(cp(j)) != std::u32string_view::npos)) ++j;
      bool only_space_after = true;
      for (std::size_t t = j; t < n; ++t) {
        if (!utf8::is_whitespace(cp(t))) { only_space_after = false; break; }
      }
      if (only_space_after) {
        terminated = true;
        break;
      }
      if (utf8::is_whitespace(cp(j))) {
        std::size_t t = j;
        while (t < n && utf8::is_whitespace(cp(t))) ++t;
        if (utf8::is_uppercase(cp(t)) || utf8::is_digit(cp(t))) {
          cuts.emplace_back(content[j - 1] + 1, content[t]);
          k = t;
          continue;
        }
      }
      k = j;
    }
    if (cuts.empty() && !terminated) return {};

    std::vector<Segment> out;
    std::size_t start = lo;
    auto emit = [&](std::size_t a, std::size_t b) {
      if (auto span = trimmed(a, b)) out.push_back(Segment{SegmentKind::sentence, *span, {}, {}, Origin::programmatic, {}});
    };
    for (const auto& [end, next] : cuts) {
      emit(start, end);
      start = next;
    }
    emit(start, hi);
    return out;
  }

  std::vector<Segment> subsentences(Span parent) const {
    const auto [lo, hi] = range(parent);
    std::vector<std::size_t> seps;
    for (std::size_t i = lo; i < hi; ++i) {
      if (classes_[i] == CharClass::separator) seps.push_back(i);
    }
    if (seps.empty()) return {};
    std::vector<Segment> out;
    std::size_t start = lo;
    auto emit = [&](std::size_t a, std::size_t b) {
      if (auto span = trimmed(a, b)) out.push_back(Segment{SegmentKind::subsentence, *span, {}, {}, Origin::programmatic, {}});
    };
    for (auto s : seps) {
      emit(start, s);
      start = s + 1;
    }
    emit(start, hi);
    return out;
  }

  Segment build_paragraph(Span span, SegmentKind target) const {
    Segment para{SegmentKind::paragraph, span, {}, {}, Origin::programmatic, {}};
    if (target >= SegmentKind::sentence) para.children = sentences(span);
    if (target == SegmentKind::subsentence) {
      if (para.children.empty()) {
        para.children = subsentences(span);
      } else {
        for (auto& s : para.children) s.children = subsentences(s.span);
      }
    }
    return para;
  }

  std::optional<Span> trimmed_bytes(Span s) const {
    auto [lo, hi] = range(s);
    return trimmed(lo, hi);
  }

 private:
  std::string_view source_;
  const SegmentationPolicy& policy_;
  std::vector<utf8::DecodedChar> chars_;
  std::vector<CharClass> classes_;
  std::vector<Span> separators_;
};

void check_policy(const LanguageTag& language, const SegmentationPolicy& policy) {
  if (language.is_multilingual()) {
    throw Error(ErrorCode::InvalidArgument,
                "multilingual text must be split into per-language versions before segmentation");
  }
  if (!policy.honor_markup) return;
  const char32_t sep = policy.separator;
  if (utf8::is_whitespace(sep) || utf8::is_letter_or_digit(sep) ||
      policy.sentence_indicators.find(sep) != std::u32string::npos) {
    throw Error(ErrorCode::SeparatorCollision,
                "separator U+" + [&] {
                  char buf[16];
                  std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(sep));
                  return std::string(buf);
                }() + " is a natural-language character");
  }
}

SegmentedText neutral_text(std::string_view text, const LanguageTag& language, SourceFormat format) {
  Segment root{SegmentKind::file, {0, text.size()}, {}, {}, Origin::programmatic, {}};
  return SegmentedText(language, std::string(text), std::move(root), {}, format);
}

std::vector<Span> with_separators(std::vector<Span> markup, const std::vector<Span>& seps) {
  markup.insert(markup.end(), seps.begin(), seps.end());
  return markup;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

bool is_block_element(std::string_view name) {
  static constexpr std::array<std::string_view, 34> kBlocks{
      "address", "article", "aside", "blockquote", "body", "br", "dd", "div", "dl",
      "dt", "figcaption", "figure", "footer", "h1", "h2", "h3", "h4", "h5", "h6",
      "header", "hr", "html", "li", "main", "nav", "ol", "p", "pre", "section",
      "table", "td", "th", "title", "ul"};
  return std::any_of(kBlocks.begin(), kBlocks.end(), [&](std::string_view b) { return iequals(b, name); });
}

}  // namespace

SegmentedText segment_text(std::string_view text, const LanguageTag& language,
                           const SegmentationPolicy& policy, SegmentKind target) {
  if (language.is_neutral()) return neutral_text(text, language, SourceFormat::plain);
  check_policy(language, policy);

  Scanner scanner(text, {}, policy);
  Segment root{SegmentKind::file, {0, text.size()}, {}, {}, Origin::programmatic, {}};

  if (target >= SegmentKind::paragraph) {
    std::vector<Span> chunks;
    std::size_t cursor = 0;
    if (!text.empty()) {
      const std::regex indicator(policy.paragraph_indicator, std::regex::ECMAScript);
      const std::string owned(text);
      for (auto it = std::sregex_iterator(owned.begin(), owned.end(), indicator);
           it != std::sregex_iterator(); ++it) {
        const auto pos = static_cast<std::size_t>(it->position());
        const auto len = static_cast<std::size_t>(it->length());
        if (len == 0) continue;
        chunks.push_back({cursor, pos});
        cursor = pos + len;
      }
    }
    chunks.push_back({cursor, text.size()});
    for (const auto& chunk : chunks) {
      if (auto span = scanner.trimmed_bytes(chunk)) root.children.push_back(scanner.build_paragraph(*span, target));
    }
  }

  return SegmentedText(language, std::string(text), std::move(root), scanner.separators());
}

SegmentedText segment_html(std::string_view html, const LanguageTag& language,
                           const SegmentationPolicy& policy, SegmentKind target) {
  if (language.is_neutral()) return neutral_text(html, language, SourceFormat::html);
  check_policy(language, policy);

  std::vector<Span> markup;
  std::vector<Span> blocks;
  std::size_t i = 0;
  const std::size_t n = html.size();
  while (i < n) {
    if (html[i] != '<') {
      ++i;
      continue;
    }
    if (html.substr(i, 4) == "<!--") {
      auto end = html.find("-->", i + 4);
      end = end == std::string_view::npos ? n : end + 3;
      markup.push_back({i, end});
      i = end;
      continue;
    }
    const bool closing = i + 1 < n && html[i + 1] == '/';
    const std::size_t name_start = i + (closing ? 2 : 1);
    if (name_start >= n || !(std::isalpha(static_cast<unsigned char>(html[name_start])) ||
                             html[name_start] == '!' || html[name_start] == '?')) {
      ++i;
      continue;
    }
    std::size_t name_end = name_start;
    while (name_end < n && (std::isalnum(static_cast<unsigned char>(html[name_end])))) ++name_end;
    const auto name = html.substr(name_start, name_end - name_start);
    std::size_t j = name_end;
    char quote = 0;
    while (j < n && (quote || html[j] != '>')) {
      if (quote && html[j] == quote) quote = 0;
      else if (!quote && (html[j] == '"' || html[j] == '\'')) quote = html[j];
      ++j;
    }
    std::size_t end = j < n ? j + 1 : n;
    if (!closing && (iequals(name, "script") || iequals(name, "style"))) {
      std::size_t k = end;
      while (k < n) {
        k = html.find("</", k);
        if (k == std::string_view::npos) { k = n; break; }
        if (iequals(html.substr(k + 2, name.size()), name)) break;
        k += 2;
      }
      const auto close = k < n ? html.find('>', k) : std::string_view::npos;
      end = close == std::string_view::npos ? n : close + 1;
    }
    markup.push_back({i, end});
    if (is_block_element(name)) blocks.push_back({i, end});
    i = end;
  }

  Scanner scanner(html, markup, policy);
  Segment root{SegmentKind::file, {0, html.size()}, {}, {}, Origin::programmatic, {}};
  if (target >= SegmentKind::paragraph) {
    std::size_t cursor = 0;
    blocks.push_back({n, n});
    for (const auto& b : blocks) {
      if (auto span = scanner.trimmed_bytes({cursor, b.begin})) {
        root.children.push_back(scanner.build_paragraph(*span, target));
      }
      cursor = b.end;
    }
  }
  return SegmentedText(language, std::string(html), std::move(root),
                       with_separators(std::move(markup), scanner.separators()), SourceFormat::html);
}

std::string rtf_to_text(std::string_view rtf) {
  static constexpr std::array<std::string_view, 12> kDestinations{
      "fonttbl", "colortbl", "stylesheet", "info", "pict", "header", "footer",
      "object", "listtable", "listoverridetable", "rsidtbl", "generator"};
  std::string out;
  std::vector<bool> skip{false};
  std::size_t i = 0;
  const std::size_t n = rtf.size();
  int pending_unicode_skip = 0;
  auto emit = [&](char32_t cp) {
    if (skip.back()) return;
    if (pending_unicode_skip > 0) {
      --pending_unicode_skip;
      return;
    }
    utf8::append(out, cp);
  };
  while (i < n) {
    const char c = rtf[i];
    if (c == '{') {
      skip.push_back(skip.back());
      ++i;
    } else if (c == '}') {
      if (skip.size() > 1) skip.pop_back();
      ++i;
    } else if (c == '\\' && i + 1 < n) {
      const char next = rtf[i + 1];
      if (next == '\\' || next == '{' || next == '}') {
        emit(static_cast<unsigned char>(next));
        i += 2;
      } else if (next == '\'' && i + 3 < n) {
        const auto hex = std::string(rtf.substr(i + 2, 2));
        emit(static_cast<char32_t>(std::strtoul(hex.c_str(), nullptr, 16)));
        i += 4;
      } else if (next == '*') {
        skip.back() = true;
        i += 2;
      } else if (next == '~') {
        emit(0xA0);
        i += 2;
      } else if (std::isalpha(static_cast<unsigned char>(next))) {
        std::size_t j = i + 1;
        while (j < n && std::isalpha(static_cast<unsigned char>(rtf[j]))) ++j;
        const auto word = rtf.substr(i + 1, j - i - 1);
        std::size_t k = j;
        if (k < n && (rtf[k] == '-' || std::isdigit(static_cast<unsigned char>(rtf[k])))) {
          ++k;
          while (k < n && std::isdigit(static_cast<unsigned char>(rtf[k]))) ++k;
        }
        const auto param = rtf.substr(j, k - j);
        if (k < n && rtf[k] == ' ') ++k;
        if (word == "par") {
          if (!skip.back()) out += "\n\n";
        } else if (word == "line") {
          if (!skip.back()) out += "\n";
        } else if (word == "tab") {
          emit(U'\t');
        } else if (word == "u" && !param.empty()) {
          long v = std::strtol(std::string(param).c_str(), nullptr, 10);
          if (v < 0) v += 65536;
          emit(static_cast<char32_t>(v));
          pending_unicode_skip = skip.back() ? 0 : 1;
        } else if (std::find(kDestinations.begin(), kDestinations.end(), word) != kDestinations.end()) {
          skip.back() = true;
        }
        i = k;
      } else {
        i += 2;
      }
    } else if (c == '\r' || c == '\n') {
      ++i;
    } else {
      emit(static_cast<unsigned char>(c));
      ++i;
    }
  }
  return out;
}

}  // namespace partext
