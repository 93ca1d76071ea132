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

#include "partext/align.hpp"

#include <algorithm>
#include <array>

#include "partext/error.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

constexpr std::array<std::pair<Entirety, std::string_view>, 7> kEntiretyNames{{
    {Entirety::complete, "complete"},
    {Entirety::partial, "partial"},
    {Entirety::summary, "summary"},
    {Entirety::translating, "translating"},
    {Entirety::machine, "machine"},
    {Entirety::suspended, "suspended"},
    {Entirety::undefined, "undefined"},
}};

bool has_content(const SegmentedText& text) {
  return !utf8::normalize_whitespace(segment_content(text, text.root())).empty();
}

}  // namespace

std::string_view to_string(Entirety e) noexcept {
  for (const auto& [value, name] : kEntiretyNames) {
    if (value == e) return name;
  }
  return "?";
}

std::optional<Entirety> parse_entirety(std::string_view name) noexcept {
  for (const auto& [value, n] : kEntiretyNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

EntiretySet::EntiretySet(std::set<Entirety> attributes) : attributes_(std::move(attributes)) {
  if (attributes_.empty()) throw Error(ErrorCode::IllegalCombination, "entirety needs at least one attribute");
  if (attributes_.contains(Entirety::undefined) && attributes_.size() > 1) {
    throw Error(ErrorCode::IllegalCombination, "'undefined' cannot be combined with other attributes");
  }
  if (attributes_.contains(Entirety::complete)) {
    for (auto clash : {Entirety::partial, Entirety::summary}) {
      if (attributes_.contains(clash)) {
        throw Error(ErrorCode::IllegalCombination,
                    "'complete' contradicts '" + std::string(partext::to_string(clash)) + "'");
      }
    }
  }
}

EntiretySet EntiretySet::parse(std::string_view text) {
  std::set<Entirety> attrs;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find_first_of(",+", start);
    if (comma == std::string_view::npos) comma = text.size();
    auto item = text.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      auto e = parse_entirety(item);
      if (!e) throw Error(ErrorCode::IllegalCombination, "unknown entirety attribute '" + std::string(item) + "'");
      attrs.insert(*e);
    }
    start = comma + 1;
  }
  return EntiretySet(std::move(attrs));
}

std::string EntiretySet::to_string() const {
  std::string out;
  for (auto e : attributes_) {
    if (!out.empty()) out += ',';
    out += partext::to_string(e);
  }
  return out;
}

TextGranularity parallel_granularity(const std::vector<TextGranularity>& granularities) {
  if (granularities.empty()) throw Error(ErrorCode::InvalidArgument, "parallel granularity of no versions");
  return *std::min_element(granularities.begin(), granularities.end());
}

TextGranularity parallel_granularity(const std::map<LanguageTag, SegmentedText>& versions) {
  std::vector<TextGranularity> all;
  for (const auto& [lang, text] : versions) all.push_back(text.granularity());
  TextGranularity meet = parallel_granularity(all);
  meet.coverage = Coverage::full;
  for (const auto& [lang, text] : versions) {
    if (coverage_at(text, meet.level) == Coverage::partial) meet.coverage = Coverage::partial;
  }
  return meet;
}

ParallelTexts align(const std::map<LanguageTag, SegmentedText>& versions, SegmentKind kind,
                    std::string provenance) {
  if (versions.size() < 2) throw Error(ErrorCode::InvalidArgument, "alignment needs at least two versions");

  std::vector<LanguageTag> non_empty;
  for (const auto& [lang, text] : versions) {
    if (has_content(text)) non_empty.push_back(lang);
  }
  if (non_empty.empty()) {
    throw Error(ErrorCode::GranularityUnachievable, "no version has content, not even file-level pairing is possible");
  }
  const bool reachable = std::any_of(versions.begin(), versions.end(),
                                     [&](const auto& v) { return v.second.granularity().level >= kind; });
  if (!reachable) {
    throw Error(ErrorCode::KindTooFine, "no version is segmented down to " + std::string(to_string(kind)));
  }

  const TextGranularity inputs = parallel_granularity(versions);
  ParallelTexts pt;
  pt.versions = versions;
  pt.provenance = std::move(provenance);

  SegmentKind level = coarser_of(kind, inputs.level);
  while (level > SegmentKind::file) {
    std::map<LanguageTag, std::vector<SegmentPath>> paths;
    std::optional<std::size_t> count;
    bool equal = true;
    for (const auto& [lang, text] : versions) {
      auto p = segments_of_kind(text, level);
      if (count && *count != p.size()) equal = false;
      count = p.size();
      paths.emplace(lang, std::move(p));
    }
    if (equal && count && *count > 0) {
      for (std::size_t i = 0; i < *count; ++i) {
        AlignmentGroup group{level, {}};
        for (const auto& [lang, p] : paths) group.members.emplace(lang, p[i]);
        pt.groups.push_back(std::move(group));
      }
      break;
    }
    level = static_cast<SegmentKind>(static_cast<int>(level) - 1);
  }
  if (level == SegmentKind::file) {
    AlignmentGroup group{SegmentKind::file, {}};
    for (const auto& lang : non_empty) group.members.emplace(lang, SegmentPath{});
    pt.groups.push_back(std::move(group));
  }

  pt.granularity.level = level;
  pt.granularity.coverage = Coverage::full;
  for (const auto& [lang, text] : versions) {
    if (coverage_at(text, level) == Coverage::partial) pt.granularity.coverage = Coverage::partial;
  }
  return pt;
}

ParallelTexts set_entirety(const ParallelTexts& pt, const LanguageTag& language, EntiretySet attributes) {
  ParallelTexts out = pt;
  out.entirety.insert_or_assign(language, std::move(attributes));
  return out;
}

std::string member_text(const ParallelTexts& pt, const AlignmentGroup& group, const LanguageTag& language) {
  const auto& text = pt.versions.at(language);
  return utf8::normalize_whitespace(segment_content(text, segment_at(text, group.members.at(language))));
}

namespace {

struct Unit {
  const Segment* segment;
  LanguageTag language;
};

bool usable(const LanguageTag& tag) { return tag.is_standard() || tag.is_neutral(); }

LanguageTag unit_language(const SegmentedText& text, const Segment& unit) {
  const LanguageSwitch* best = nullptr;
  for (const auto& sw : text.switches()) {
    if (!usable(sw.language) || !sw.span.contains(unit.span)) continue;
    if (!best || best->span.contains(sw.span)) best = &sw;
  }
  if (best) return best->language;
  if (usable(text.language())) return text.language();
  throw Error(ErrorCode::InvalidArgument,
              "segment at byte " + std::to_string(unit.span.begin) + " has no determinable language");
}

void check_not_mixed(const SegmentedText& text, const Segment& unit, const LanguageTag& language) {
  for (const auto& sw : text.switches()) {
    if (!usable(sw.language) || sw.language.is_neutral() || sw.language == language) continue;
    if (sw.span.contains(unit.span)) continue;
    const bool overlaps = sw.span.begin < unit.span.end && unit.span.begin < sw.span.end;
    if (overlaps && !utf8::normalize_whitespace(text.source().substr(sw.span.begin, sw.span.size())).empty()) {
      throw Error(ErrorCode::VeryMixedUnsupported,
                  "language switches to '" + sw.language.code() + "' inside a " + std::string(to_string(unit.kind)) +
                      " at byte " + std::to_string(sw.span.begin),
                  sw.span.begin);
    }
  }
}

}  // namespace

std::map<LanguageTag, SegmentedText> split_multilingual(const SegmentedText& text) {
  std::vector<Unit> units;
  if (text.root().children.empty()) {
    units.push_back({&text.root(), unit_language(text, text.root())});
  } else {
    for (const auto& child : text.root().children) units.push_back({&child, unit_language(text, child)});
  }
  for (const auto& u : units) check_not_mixed(text, *u.segment, u.language);

  std::set<LanguageTag> languages;
  for (const auto& u : units) {
    if (!u.language.is_neutral()) languages.insert(u.language);
  }
  if (languages.empty()) languages.insert(units.front().language);

  std::map<LanguageTag, SegmentedText> out;
  for (const auto& lang : languages) {
    if (units.size() == 1 && units.front().segment == &text.root()) {
      out.emplace(lang, SegmentedText(lang, text.source(), text.root(), text.non_content(), text.format(),
                                      text.switches()));
      continue;
    }
    Segment root = text.root();
    root.children.clear();
    std::vector<Span> excluded = text.non_content();
    for (const auto& u : units) {
      if (u.language == lang || u.language.is_neutral()) {
        root.children.push_back(*u.segment);
      } else {
        excluded.push_back(u.segment->span);
      }
    }
    std::vector<LanguageSwitch> switches;
    for (const auto& sw : text.switches()) {
      if (sw.language == lang || sw.language.is_neutral()) switches.push_back(sw);
    }
    out.emplace(lang, SegmentedText(lang, text.source(), std::move(root), std::move(excluded), text.format(),
                                    std::move(switches)));
  }
  return out;
}

std::vector<ConsistencyDiagnostic> check_multilingual_consistency(const ParallelTexts& pt,
                                                                  const SegmentedText& projection,
                                                                  const LanguageTag& language) {
  if (!pt.versions.contains(language)) {
    throw Error(ErrorCode::InvalidArgument, "language '" + language.code() + "' has no version");
  }
  std::vector<ConsistencyDiagnostic> diags;
  if (pt.groups.empty()) return diags;
  const SegmentKind kind = pt.groups.front().kind;
  std::vector<SegmentPath> projected;
  if (kind == SegmentKind::file) {
    projected.push_back({});
  } else {
    projected = segments_of_kind(projection, kind);
  }

  std::size_t next = 0;
  for (std::size_t g = 0; g < pt.groups.size(); ++g) {
    const auto& group = pt.groups[g];
    if (!group.members.contains(language)) continue;
    const std::string expected = member_text(pt, group, language);
    if (next >= projected.size()) {
      diags.push_back({g, "group " + std::to_string(g) + " is not covered by the multilingual file"});
      continue;
    }
    const std::string actual =
        utf8::normalize_whitespace(segment_content(projection, segment_at(projection, projected[next++])));
    if (actual != expected) {
      diags.push_back({g, "group " + std::to_string(g) + " differs: \"" + actual + "\" vs \"" + expected + "\""});
    }
  }
  return diags;
}

}  // namespace partext
