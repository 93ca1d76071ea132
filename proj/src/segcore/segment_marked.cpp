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

#include <expat.h>

#include <climits>
#include <cstring>
#include <memory>

#include "partext/error.hpp"
#include "partext/segcore.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};
using ParserPtr = std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter>;

std::optional<SegmentKind> element_kind(std::string_view name) {
  if (name == "p") return SegmentKind::paragraph;
  if (name == "s") return SegmentKind::sentence;
  if (name == "sub") return SegmentKind::subsentence;
  return std::nullopt;
}

struct OpenElement {
  std::optional<SegmentKind> kind;  // nullopt for transparent elements
  Segment segment;
  std::optional<LanguageTag> language;
};

struct MarkedBuilder {
  XML_Parser parser = nullptr;
  std::string_view doc;
  std::vector<OpenElement> stack;
  std::optional<Segment> root;
  std::optional<LanguageTag> root_language;
  std::string base;
  std::vector<Span> content_ranges;
  std::vector<LanguageSwitch> switches;
  std::optional<Error> failure;

  std::size_t offset() const { return static_cast<std::size_t>(XML_GetCurrentByteIndex(parser)); }
  std::size_t event_length() const { return static_cast<std::size_t>(XML_GetCurrentByteCount(parser)); }

  void fail(const std::string& what) {
    if (!failure) failure.emplace(ErrorCode::MalformedMarkup, what + " at byte " + std::to_string(offset()), offset());
    XML_StopParser(parser, XML_FALSE);
  }

  Segment* enclosing_segment() {
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      if (it->kind) return &it->segment;
    }
    return root ? &*root : nullptr;
  }

  void start(const XML_Char* name, const XML_Char** attrs) {
    const std::size_t tag_end = offset() + event_length();
    std::optional<LanguageTag> lang;
    std::optional<std::string> rec;
    for (std::size_t i = 0; attrs[i]; i += 2) {
      std::string_view key = attrs[i];
      std::string_view value = attrs[i + 1];
      if (key == "xml:lang") {
        auto primary = value.substr(0, value.find('-'));
        try {
          lang = parse_tag(primary);
        } catch (const Error& e) {
          fail(std::string("bad xml:lang: ") + e.what());
          return;
        }
      } else if (key == "rec") {
        rec = std::string(value);
      } else if ((key == "base" || key == "xml:base") && stack.empty() && !root) {
        base = std::string(value);
        while (!base.empty() && base.back() == '/') base.pop_back();
      }
    }

    if (!root) {
      root = Segment{SegmentKind::file, {0, doc.size()}, {}, {}, Origin::programmatic, {}};
      root_language = lang;
      if (lang) switches.push_back({{0, doc.size()}, *lang});
      return;
    }

    OpenElement open;
    open.kind = element_kind(name);
    open.language = lang;
    if (open.kind) {
      const Segment* parent = enclosing_segment();
      if (!is_finer(*open.kind, parent->kind)) {
        fail("<" + std::string(name) + "> cannot nest inside a " + std::string(to_string(parent->kind)) + " segment");
        return;
      }
      open.segment.kind = *open.kind;
      open.segment.span.begin = tag_end;
      open.segment.language = lang;
      if (rec) {
        if (rec->find("://") != std::string::npos) {
          open.segment.record_uri = *rec;
        } else if (!base.empty()) {
          open.segment.record_uri = base + "/" + *rec;
        } else {
          open.segment.record_uri = *rec;
        }
      }
    }
    open.segment.span.begin = tag_end;
    stack.push_back(std::move(open));
  }

  void end() {
    if (stack.empty()) return;  // root
    OpenElement open = std::move(stack.back());
    stack.pop_back();
    // Empty-element tags report the end event with a zero-length count.
    const std::size_t content_end = event_length() == 0 ? open.segment.span.begin : offset();
    if (open.language) switches.push_back({{open.segment.span.begin, content_end}, *open.language});
    if (!open.kind) return;
    open.segment.span.end = content_end;
    enclosing_segment()->children.push_back(std::move(open.segment));
  }

  void text() {
    const std::size_t begin = offset();
    const std::size_t len = event_length();
    if (len == 0) return;
    if (!content_ranges.empty() && content_ranges.back().end == begin) {
      content_ranges.back().end = begin + len;
    } else {
      content_ranges.push_back({begin, begin + len});
    }
  }
};

}  // namespace

SegmentedText segment_marked(std::string_view document) {
  if (auto bad = utf8::find_invalid(document)) {
    throw Error(ErrorCode::InvalidEncoding, "marked document is not valid UTF-8", *bad);
  }
  if (document.size() > static_cast<std::size_t>(INT_MAX)) {
    throw Error(ErrorCode::InvalidArgument, "marked document too large");
  }

  ParserPtr parser(XML_ParserCreate("UTF-8"));
  MarkedBuilder b;
  b.parser = parser.get();
  b.doc = document;
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(
      parser.get(),
      [](void* ud, const XML_Char* name, const XML_Char** attrs) {
        static_cast<MarkedBuilder*>(ud)->start(name, attrs);
      },
      [](void* ud, const XML_Char*) { static_cast<MarkedBuilder*>(ud)->end(); });
  XML_SetCharacterDataHandler(parser.get(), [](void* ud, const XML_Char*, int) {
    static_cast<MarkedBuilder*>(ud)->text();
  });

  const auto status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE);
  if (b.failure) throw *b.failure;
  if (status != XML_STATUS_OK) {
    const auto pos = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
    throw Error(ErrorCode::MalformedMarkup,
                std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                    std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                    std::to_string(XML_GetCurrentColumnNumber(parser.get())),
                pos);
  }
  if (!b.root) throw Error(ErrorCode::MalformedMarkup, "document has no root element", 0);

  // Everything outside character data is markup.
  std::vector<Span> markup;
  std::size_t cursor = 0;
  for (const auto& r : b.content_ranges) {
    if (r.begin > cursor) markup.push_back({cursor, r.begin});
    cursor = r.end;
  }
  if (cursor < document.size()) markup.push_back({cursor, document.size()});

  auto language = b.root_language.value_or(LanguageTag::from_valid_code("un"));
  return SegmentedText(std::move(language), std::string(document), std::move(*b.root), std::move(markup),
                       SourceFormat::marked, std::move(b.switches));
}

}  // namespace partext
