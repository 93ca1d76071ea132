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

#include <charconv>
#include <climits>
#include <cstdio>
#include <memory>

#include "lingstore_internal.hpp"
#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

constexpr std::string_view kInlineElements[] = {"bpt", "ept", "it", "ph", "hi", "ut", "sub"};

bool is_inline(std::string_view name) {
  for (auto n : kInlineElements) {
    if (n == name) return true;
  }
  return false;
}

void check_xml_text(const std::string& text, std::string_view what) {
  for (unsigned char c : text) {
    if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') {
      throw Error(ErrorCode::Unrepresentable, std::string(what) + " holds a control character TMX cannot carry");
    }
  }
}

void write_prop(std::string& out, std::string_view type, const std::string& value) {
  check_xml_text(value, type);
  out += "      <prop type=\"";
  out += type;
  out += "\">";
  out += utf8::escape_xml(value);
  out += "</prop>\n";
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

class TmxReader {
 public:
  explicit TmxReader(XML_Parser parser) : parser_(parser) {}

  LinguisticTable table{"imported"};
  std::optional<Error> failure;
  std::set<std::string> inline_found;

  void start(std::string_view name, const XML_Char** attrs) {
    const std::string parent = stack_.empty() ? std::string() : stack_.back();
    stack_.emplace_back(name);
    if (ignored_depth_ > 0 || in_seg_inline_ > 0) {
      if (in_seg_inline_ > 0) {
        ++in_seg_inline_;
        if (is_inline(name)) inline_found.emplace(name);
      } else {
        ++ignored_depth_;
      }
      return;
    }
    if (parent.empty()) {
      if (name != "tmx") fail("root element is <" + std::string(name) + ">, expected <tmx>");
      return;
    }
    if (parent == "seg") {
      inline_found.emplace(name);
      in_seg_inline_ = 1;
      return;
    }
    if ((name == "header" || name == "body") && parent == "tmx") return;
    if (name == "tu" && parent == "body") {
      tu_ = LinguisticRecord{};
      return;
    }
    if (name == "tuv" && parent == "tu") {
      tuv_lang_.reset();
      for (std::size_t i = 0; attrs[i]; i += 2) {
        std::string_view key = attrs[i];
        if (key == "xml:lang" || key == "lang") {
          std::string_view value = attrs[i + 1];
          auto primary = value.substr(0, value.find_first_of("-_"));
          auto tag = try_parse_tag(primary);
          if (!tag) {
            fail("unsupported language '" + std::string(value) + "'");
            return;
          }
          tuv_lang_ = *tag;
        }
      }
      if (!tuv_lang_) fail("<tuv> without xml:lang");
      seg_.reset();
      return;
    }
    if (name == "seg" && parent == "tuv") {
      seg_ = std::string();
      return;
    }
    if (name == "prop" && (parent == "header" || parent == "tu" || parent == "tuv")) {
      prop_type_.clear();
      prop_text_.clear();
      for (std::size_t i = 0; attrs[i]; i += 2) {
        if (std::string_view(attrs[i]) == "type") prop_type_ = attrs[i + 1];
      }
      return;
    }
    if (name == "note" || name == "ude" || name == "map") {
      ignored_depth_ = 1;
      return;
    }
    fail("unexpected <" + std::string(name) + "> inside <" + std::string(parent) + ">");
  }

  void end() {
    const std::string name = stack_.back();
    stack_.pop_back();
    if (in_seg_inline_ > 0) {
      --in_seg_inline_;
      return;
    }
    if (ignored_depth_ > 0) {
      --ignored_depth_;
      return;
    }
    const std::string_view parent = stack_.empty() ? std::string_view{} : std::string_view(stack_.back());
    if (name == "prop") {
      end_prop(parent);
    } else if (name == "tuv") {
      if (seg_ && !seg_->empty()) {
        if (tu_.segments.contains(*tuv_lang_)) {
          fail("two <tuv> elements for '" + tuv_lang_->code() + "'");
          return;
        }
        tu_.segments.emplace(*tuv_lang_, std::move(*seg_));
      }
    } else if (name == "tu") {
      if (!tu_.segments.empty()) {
        tu_.id = table.size() + 1;
        table.insert_with_id(std::move(tu_));
      }
    }
  }

  void text(std::string_view data) {
    if (in_seg_inline_ > 0 || ignored_depth_ > 0 || stack_.empty()) return;
    if (stack_.back() == "seg" && seg_) {
      *seg_ += data;
    } else if (stack_.back() == "prop") {
      prop_text_ += data;
    }
  }

  void fail(const std::string& what) {
    if (!failure) {
      const auto pos = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser_));
      failure.emplace(ErrorCode::MalformedTmx, what + " at byte " + std::to_string(pos), pos);
    }
    XML_StopParser(parser_, XML_FALSE);
  }

 private:
  void end_prop(std::string_view parent) {
    if (parent == "header") {
      if (prop_type_ == "x-table") table.set_name(prop_text_);
      return;
    }
    if (parent != "tu") return;
    auto number = [&](auto& target) {
      auto [p, ec] = std::from_chars(prop_text_.data(), prop_text_.data() + prop_text_.size(), target);
      if (ec != std::errc() || p != prop_text_.data() + prop_text_.size()) fail("bad " + prop_type_ + " value");
    };
    if (prop_type_ == "x-domain") {
      tu_.domain = prop_text_;
    } else if (prop_type_ == "x-source-link") {
      tu_.source_link = prop_text_;
    } else if (prop_type_ == "x-reads") {
      number(tu_.value.reads);
    } else if (prop_type_ == "x-uses") {
      number(tu_.value.uses);
    } else if (prop_type_ == "x-value-override") {
      double v = 0;
      number(v);
      tu_.value.manual_override = v;
    } else if (prop_type_ == "x-provenance-table") {
      if (!tu_.provenance) tu_.provenance.emplace();
      tu_.provenance->table = prop_text_;
    } else if (prop_type_ == "x-provenance-id") {
      if (!tu_.provenance) tu_.provenance.emplace();
      number(tu_.provenance->id);
    }
  }

  XML_Parser parser_;
  std::vector<std::string> stack_;
  int ignored_depth_ = 0;
  int in_seg_inline_ = 0;
  LinguisticRecord tu_;
  std::optional<LanguageTag> tuv_lang_;
  std::optional<std::string> seg_;
  std::string prop_type_;
  std::string prop_text_;
};

}  // namespace

std::string export_tmx(const LinguisticTable& table, const std::set<LanguageTag>& languages) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<tmx version=\"1.4\">\n";
  out += "  <header creationtool=\"partext\" creationtoolversion=\"1.0\" datatype=\"plaintext\" "
         "segtype=\"sentence\" adminlang=\"en\" srclang=\"*all*\" o-tmf=\"partext\">\n";
  const std::string name = table.name();
  check_xml_text(name, "table name");
  out += "    <prop type=\"x-table\">" + utf8::escape_xml(name) + "</prop>\n";
  out += "  </header>\n";
  out += "  <body>\n";
  for (const auto& r : table.records()) {
    std::vector<std::pair<const LanguageTag*, const std::string*>> variants;
    for (const auto& [lang, text] : r.segments) {
      if (languages.empty() || languages.contains(lang)) variants.emplace_back(&lang, &text);
    }
    if (variants.empty()) continue;
    out += "    <tu tuid=\"" + std::to_string(r.id) + "\">\n";
    if (r.domain) write_prop(out, "x-domain", *r.domain);
    if (r.source_link) write_prop(out, "x-source-link", *r.source_link);
    if (r.value.reads) write_prop(out, "x-reads", std::to_string(r.value.reads));
    if (r.value.uses) write_prop(out, "x-uses", std::to_string(r.value.uses));
    if (r.value.manual_override) write_prop(out, "x-value-override", detail::format_double(*r.value.manual_override));
    if (r.provenance) {
      write_prop(out, "x-provenance-table", r.provenance->table);
      write_prop(out, "x-provenance-id", std::to_string(r.provenance->id));
    }
    for (const auto& [lang, text] : variants) {
      check_xml_text(*text, "segment");
      out += "      <tuv xml:lang=\"" + lang->code() + "\"><seg>" + utf8::escape_xml(*text) + "</seg></tuv>\n";
    }
    out += "    </tu>\n";
  }
  out += "  </body>\n";
  out += "</tmx>\n";
  return out;
}

LinguisticTable import_tmx(std::string_view tmx) {
  if (tmx.size() > static_cast<std::size_t>(INT_MAX)) throw Error(ErrorCode::MalformedTmx, "document too large");
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  TmxReader reader(parser.get());
  XML_SetUserData(parser.get(), &reader);
  XML_SetElementHandler(
      parser.get(),
      [](void* ud, const XML_Char* name, const XML_Char** attrs) { static_cast<TmxReader*>(ud)->start(name, attrs); },
      [](void* ud, const XML_Char*) { static_cast<TmxReader*>(ud)->end(); });
  XML_SetCharacterDataHandler(parser.get(), [](void* ud, const XML_Char* s, int len) {
    static_cast<TmxReader*>(ud)->text(std::string_view(s, static_cast<std::size_t>(len)));
  });

  const auto status = XML_Parse(parser.get(), tmx.data(), static_cast<int>(tmx.size()), XML_TRUE);
  if (reader.failure) throw *reader.failure;
  if (status != XML_STATUS_OK) {
    const auto pos = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
    throw Error(ErrorCode::MalformedTmx,
                std::string(XML_ErrorString(XML_GetErrorCode(parser.get()))) + " at line " +
                    std::to_string(XML_GetCurrentLineNumber(parser.get())) + ", column " +
                    std::to_string(XML_GetCurrentColumnNumber(parser.get())),
                pos);
  }
  if (!reader.inline_found.empty()) {
    std::string names;
    for (const auto& n : reader.inline_found) names += (names.empty() ? "<" : ", <") + n + ">";
    throw Error(ErrorCode::UnsupportedTmx, "inline markup is not supported: " + names);
  }
  return std::move(reader.table);
}

}  // namespace partext
