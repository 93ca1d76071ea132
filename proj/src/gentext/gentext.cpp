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

#include "partext/gentext.hpp"

#include <charconv>

#include "partext/utf8.hpp"

namespace partext {

namespace {

[[noreturn]] void malformed(const std::string& what, std::size_t pos) {
  throw Error(ErrorCode::MalformedTemplate, what + " at byte " + std::to_string(pos), pos);
}

std::optional<RecordId> parse_record_ref(std::string_view s) {
  if (s.size() < 2 || s[0] != 'r' || s[1] < '0' || s[1] > '9') return std::nullopt;
  RecordId id = 0;
  auto [p, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), id);
  if (ec != std::errc() || p != s.data() + s.size() || id == 0) return std::nullopt;
  return id;
}

class TemplateParser {
 public:
  TemplateParser(std::string_view text, std::string name) : text_(text) { tmpl_.name = std::move(name); }

  DocumentTemplate run() {
    if (auto bad = utf8::find_invalid(text_)) malformed("invalid UTF-8", *bad);
    std::string literal;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == '{' && peek(1) == '{') {
        literal += '{';
        i_ += 2;
      } else if (c == '}' && peek(1) == '}') {
        literal += '}';
        i_ += 2;
      } else if (c == '}') {
        malformed("unmatched '}' (write '}}' for a literal brace)", i_);
      } else if (c == '{') {
        directive(literal);
      } else {
        literal += c;
        ++i_;
      }
    }
    flush(literal);
    return std::move(tmpl_);
  }

 private:
  char peek(std::size_t k) const { return i_ + k < text_.size() ? text_[i_ + k] : '\0'; }

  // Returns the body of `{...}` at i_ and moves past the closing brace.
  std::string_view directive_body() {
    const auto start = i_;
    const auto close = text_.find_first_of("{}\n", i_ + 1);
    if (close == std::string_view::npos || text_[close] != '}') malformed("unterminated '{'", start);
    i_ = close + 1;
    return text_.substr(start + 1, close - start - 1);
  }

  void flush(std::string& literal) {
    if (literal.empty()) return;
    if (!tmpl_.parts.empty()) {
      if (auto* prev = std::get_if<std::string>(&tmpl_.parts.back())) {
        *prev += literal;
        literal.clear();
        return;
      }
    }
    tmpl_.parts.emplace_back(std::move(literal));
    literal.clear();
  }

  void directive(std::string& literal) {
    const auto start = i_;
    const auto body = directive_body();
    if (auto id = parse_record_ref(body)) {
      flush(literal);
      tmpl_.parts.emplace_back(Placeholder{"", *id});
      return;
    }
    if (const auto hash = body.rfind('#'); hash != std::string_view::npos && hash > 0) {
      if (auto id = parse_record_ref(body.substr(hash + 1))) {
        flush(literal);
        tmpl_.parts.emplace_back(Placeholder{std::string(body.substr(0, hash)), *id});
        return;
      }
    }
    if (body.starts_with("base:")) {
      declare_base(body.substr(5), start);
      return;
    }
    if (body.starts_with("lang:")) {
      flush(literal);
      language_block(body.substr(5), start);
      return;
    }
    if (body == "/lang") malformed("'{/lang}' without an open block", start);
    malformed("unknown directive '{" + std::string(body) + "}'", start);
  }

  void declare_base(std::string_view spec, std::size_t at) {
    const auto space = spec.find(' ');
    if (space == std::string_view::npos) {
      if (spec.empty()) malformed("empty base URI", at);
      if (tmpl_.default_base) malformed("default base declared twice", at);
      tmpl_.default_base = std::string(spec);
      return;
    }
    const auto alias = spec.substr(0, space);
    const auto uri = spec.substr(space + 1);
    if (alias.empty() || uri.empty() || uri.find(' ') != std::string_view::npos) malformed("bad base declaration", at);
    if (!tmpl_.aliases.emplace(std::string(alias), std::string(uri)).second) {
      malformed("base alias '" + std::string(alias) + "' declared twice", at);
    }
  }

  void language_block(std::string_view code, std::size_t at) {
    auto tag = try_parse_tag(code);
    if (!tag || !tag->is_standard()) malformed("'" + std::string(code) + "' is not a standard language", at);
    std::string text;
    while (true) {
      if (i_ >= text_.size()) malformed("unterminated '{lang:" + std::string(code) + "}' block", at);
      const char c = text_[i_];
      if ((c == '{' || c == '}') && peek(1) == c) {
        text += c;
        i_ += 2;
      } else if (c == '{') {
        const auto inner = i_;
        if (directive_body() == "/lang") break;
        malformed("only literal text is allowed inside a language block", inner);
      } else if (c == '}') {
        malformed("unmatched '}' (write '}}' for a literal brace)", i_);
      } else {
        text += c;
        ++i_;
      }
    }
    if (text.empty()) return;
    if (tmpl_.parts.empty() || !std::holds_alternative<LanguageLiterals>(tmpl_.parts.back())) {
      tmpl_.parts.emplace_back(LanguageLiterals{});
    }
    std::get<LanguageLiterals>(tmpl_.parts.back()).text[*tag] += text;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  DocumentTemplate tmpl_;
};

std::string describe(const std::vector<GenerationFailure>& failures) {
  std::string out;
  for (const auto& f : failures) {
    if (!out.empty()) out += "; ";
    if (f.code == ErrorCode::UnknownRecord) {
      out += "unknown record " + record_uri(f.base, f.id);
    } else {
      out += "record " + record_uri(f.base, f.id) + " has no '" + f.language.code() + "' segment";
    }
  }
  return out;
}

ErrorCode leading_code(const std::vector<GenerationFailure>& failures) {
  for (const auto& f : failures) {
    if (f.code == ErrorCode::UnknownRecord) return ErrorCode::UnknownRecord;
  }
  return ErrorCode::MissingLanguage;
}

struct Resolver {
  const DocumentTemplate& tmpl;
  const TableRegistry& tables;

  std::string base_of(const Placeholder& p) const {
    if (p.table.empty()) {
      if (tmpl.default_base) return *tmpl.default_base;
      if (tables.size() == 1) return tables.begin()->first;
      throw Error(ErrorCode::UnknownBase, "template '" + tmpl.name + "' declares no default base");
    }
    if (auto it = tmpl.aliases.find(p.table); it != tmpl.aliases.end()) return it->second;
    return p.table;
  }

  LinguisticTable& table_of(const std::string& base) const {
    auto it = tables.find(base);
    if (it == tables.end() || !it->second) throw Error(ErrorCode::UnknownBase, "no table registered for '" + base + "'");
    return *it->second;
  }
};

struct Use {
  LinguisticTable* table;
  RecordId id;
};

// One version, skipping placeholders that fail; the caller decides whether
// failures are fatal. `slots[k]` is the segment index of placeholder k.
struct Version {
  std::string source;
  std::vector<Segment> segments;
  std::vector<Span> non_content;
  std::vector<std::optional<std::size_t>> slots;
  std::vector<GenerationFailure> failures;
  std::vector<Use> uses;
};

Version fill(const DocumentTemplate& tmpl, const Resolver& resolver, const LanguageTag& language) {
  if (!language.is_standard()) {
    throw Error(ErrorCode::InvalidArgument, "cannot generate a '" + language.code() + "' version");
  }
  Version v;
  auto literal = [&](const std::string& text) {
    if (text.empty()) return;
    v.non_content.push_back({v.source.size(), v.source.size() + text.size()});
    v.source += text;
  };
  for (const auto& part : tmpl.parts) {
    if (const auto* text = std::get_if<std::string>(&part)) {
      literal(*text);
    } else if (const auto* block = std::get_if<LanguageLiterals>(&part)) {
      if (auto it = block->text.find(language); it != block->text.end()) literal(it->second);
    } else {
      const auto& p = std::get<Placeholder>(part);
      const auto base = resolver.base_of(p);
      auto& table = resolver.table_of(base);
      auto record = table.find(p.id);
      if (!record) {
        v.failures.push_back({ErrorCode::UnknownRecord, base, p.id, language});
        v.slots.emplace_back();
        continue;
      }
      auto it = record->segments.find(language);
      if (it == record->segments.end()) {
        v.failures.push_back({ErrorCode::MissingLanguage, base, p.id, language});
        v.slots.emplace_back();
        continue;
      }
      Segment seg;
      seg.kind = SegmentKind::sentence;
      seg.span = {v.source.size(), v.source.size() + it->second.size()};
      seg.record_uri = record_uri(base, p.id);
      v.source += it->second;
      v.slots.emplace_back(v.segments.size());
      v.segments.push_back(std::move(seg));
      v.uses.push_back({&table, p.id});
    }
  }
  return v;
}

SegmentedText to_text(Version&& v, const LanguageTag& language) {
  Segment root;
  root.kind = SegmentKind::file;
  root.span = {0, v.source.size()};
  root.children = std::move(v.segments);
  return SegmentedText(language, std::move(v.source), std::move(root), std::move(v.non_content));
}

TableRegistry single(const DocumentTemplate& tmpl, LinguisticTable& table) {
  auto alias = std::shared_ptr<LinguisticTable>(&table, [](LinguisticTable*) {});
  return TableRegistry{{tmpl.default_base.value_or(table.name()), std::move(alias)}};
}

}  // namespace

std::size_t DocumentTemplate::placeholder_count() const {
  std::size_t n = 0;
  for (const auto& part : parts) n += std::holds_alternative<Placeholder>(part) ? 1 : 0;
  return n;
}

GenerationError::GenerationError(std::vector<GenerationFailure> failures)
    : Error(leading_code(failures), describe(failures)), failures_(std::move(failures)) {}

DocumentTemplate parse_template(std::string_view text, std::string name) {
  return TemplateParser(text, std::move(name)).run();
}

SegmentedText generate(const DocumentTemplate& tmpl, const TableRegistry& tables, const LanguageTag& language) {
  auto v = fill(tmpl, Resolver{tmpl, tables}, language);
  if (!v.failures.empty()) throw GenerationError(std::move(v.failures));
  for (const auto& u : v.uses) u.table->bump_value(u.id, ValueEvent::use);
  return to_text(std::move(v), language);
}

SegmentedText generate(const DocumentTemplate& tmpl, LinguisticTable& table, const LanguageTag& language) {
  return generate(tmpl, single(tmpl, table), language);
}

ParallelTexts generate_all(const DocumentTemplate& tmpl, const TableRegistry& tables,
                           const std::set<LanguageTag>& languages, std::vector<GenerationFailure>* failures) {
  if (languages.empty()) throw Error(ErrorCode::InvalidArgument, "no target languages");
  const Resolver resolver{tmpl, tables};
  std::map<LanguageTag, Version> filled;
  std::vector<GenerationFailure> all;
  bool any_complete = false;
  bool any_unknown = false;
  for (const auto& lang : languages) {
    auto v = fill(tmpl, resolver, lang);
    any_complete = any_complete || v.failures.empty();
    for (const auto& f : v.failures) any_unknown = any_unknown || f.code == ErrorCode::UnknownRecord;
    all.insert(all.end(), v.failures.begin(), v.failures.end());
    filled.emplace(lang, std::move(v));
  }
  if (any_unknown || !any_complete) throw GenerationError(std::move(all));

  ParallelTexts pt;
  pt.provenance = tmpl.name;
  const auto n = tmpl.placeholder_count();
  pt.groups.resize(n);
  for (auto& g : pt.groups) g.kind = SegmentKind::sentence;
  for (auto& [lang, v] : filled) {
    for (const auto& u : v.uses) u.table->bump_value(u.id, ValueEvent::use);
    for (std::size_t k = 0; k < n; ++k) {
      if (v.slots[k]) pt.groups[k].members.emplace(lang, SegmentPath{*v.slots[k]});
    }
    pt.entirety.emplace(lang, EntiretySet{v.failures.empty() ? Entirety::complete : Entirety::partial});
    pt.versions.emplace(lang, to_text(std::move(v), lang));
  }
  std::erase_if(pt.groups, [](const AlignmentGroup& g) { return g.members.empty(); });
  pt.granularity = parallel_granularity(pt.versions);
  if (failures) *failures = std::move(all);
  return pt;
}

ParallelTexts generate_all(const DocumentTemplate& tmpl, LinguisticTable& table,
                           const std::set<LanguageTag>& languages, std::vector<GenerationFailure>* failures) {
  return generate_all(tmpl, single(tmpl, table), languages, failures);
}

}  // namespace partext
