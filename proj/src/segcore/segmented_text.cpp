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

#include <json.hpp>

#include "partext/error.hpp"
#include "partext/segcore.hpp"
#include "partext/utf8.hpp"
#include "segcore_internal.hpp"

namespace partext {

std::string_view to_string(SegmentKind kind) noexcept {
  switch (kind) {
    case SegmentKind::file: return "file";
    case SegmentKind::paragraph: return "paragraph";
    case SegmentKind::sentence: return "sentence";
    case SegmentKind::subsentence: return "sub-sentence";
  }
  return "file";
}

std::optional<SegmentKind> parse_segment_kind(std::string_view name) noexcept {
  if (name == "file") return SegmentKind::file;
  if (name == "paragraph") return SegmentKind::paragraph;
  if (name == "sentence") return SegmentKind::sentence;
  if (name == "sub-sentence" || name == "subsentence") return SegmentKind::subsentence;
  return std::nullopt;
}

std::string to_string(const TextGranularity& g) {
  return std::string(to_string(g.level)) + (g.coverage == Coverage::full ? ", full" : ", partial");
}

namespace {

void validate_segment(const Segment& seg, const std::string& source) {
  if (seg.span.begin > seg.span.end || seg.span.end > source.size()) {
    throw Error(ErrorCode::InvalidArgument, "segment span out of range", seg.span.begin);
  }
  if (!utf8::is_boundary(source, seg.span.begin) || !utf8::is_boundary(source, seg.span.end)) {
    throw Error(ErrorCode::InvalidArgument, "segment span splits a character", seg.span.begin);
  }
  std::size_t cursor = seg.span.begin;
  for (const auto& child : seg.children) {
    if (!is_finer(child.kind, seg.kind)) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(to_string(child.kind)) + " segment nested in " +
                      std::string(to_string(seg.kind)),
                  child.span.begin);
    }
    if (!seg.span.contains(child.span) || child.span.begin < cursor) {
      throw Error(ErrorCode::InvalidArgument, "child spans overlap or leave their parent",
                  child.span.begin);
    }
    validate_segment(child, source);
    cursor = child.span.end;
  }
}

std::vector<Span> normalize_spans(std::vector<Span> spans, std::size_t limit) {
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.begin < b.begin; });
  std::vector<Span> merged;
  for (const auto& s : spans) {
    if (s.begin > s.end || s.end > limit) {
      throw Error(ErrorCode::InvalidArgument, "non-content span out of range", s.begin);
    }
    if (s.empty()) continue;
    if (!merged.empty() && s.begin <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, s.end);
    } else {
      merged.push_back(s);
    }
  }
  return merged;
}

void collect_kind(const Segment& seg, SegmentKind kind, SegmentPath& path,
                  std::vector<SegmentPath>& out) {
  if (seg.kind == kind) out.push_back(path);
  for (std::size_t i = 0; i < seg.children.size(); ++i) {
    path.push_back(i);
    collect_kind(seg.children[i], kind, path, out);
    path.pop_back();
  }
}

void collect_leaves(const Segment& seg, SegmentPath& path, std::vector<SegmentPath>& out) {
  if (seg.children.empty()) {
    out.push_back(path);
    return;
  }
  for (std::size_t i = 0; i < seg.children.size(); ++i) {
    path.push_back(i);
    collect_leaves(seg.children[i], path, out);
    path.pop_back();
  }
}

void max_kind(const Segment& seg, SegmentKind& best) {
  if (seg.kind > best) best = seg.kind;
  for (const auto& c : seg.children) max_kind(c, best);
}

// Outermost spans of segments at `level` or finer.
void covering_spans(const Segment& seg, SegmentKind level, std::vector<Span>& out) {
  if (seg.kind >= level) {
    out.push_back(seg.span);
    return;
  }
  for (const auto& c : seg.children) covering_spans(c, level, out);
}

Segment& mutable_segment_at(Segment& root, const SegmentPath& path) {
  Segment* cur = &root;
  for (auto idx : path) {
    if (idx >= cur->children.size()) {
      throw Error(ErrorCode::InvalidArgument, "segment path out of range");
    }
    cur = &cur->children[idx];
  }
  return *cur;
}

}  // namespace

SegmentedText::SegmentedText(LanguageTag language, std::string source, Segment root,
                             std::vector<Span> non_content, SourceFormat format,
                             std::vector<LanguageSwitch> switches)
    : language_(std::move(language)),
      source_(std::move(source)),
      root_(std::move(root)),
      format_(format),
      switches_(std::move(switches)) {
  if (auto bad = utf8::find_invalid(source_)) {
    throw Error(ErrorCode::InvalidEncoding, "source is not valid UTF-8", *bad);
  }
  if (root_.kind != SegmentKind::file || root_.span != Span{0, source_.size()}) {
    throw Error(ErrorCode::InvalidArgument, "root must be a file segment covering the source");
  }
  validate_segment(root_, source_);
  non_content_ = normalize_spans(std::move(non_content), source_.size());
  granularity_ = compute_granularity(*this);
}

Coverage coverage_at(const SegmentedText& text, SegmentKind level) {
  std::vector<Span> covered;
  covering_spans(text.root(), level, covered);

  const auto& src = text.source();
  const auto& skip = text.non_content();
  std::size_t cov = 0;
  std::size_t nc = 0;
  std::size_t i = 0;
  while (i < src.size()) {
    while (nc < skip.size() && skip[nc].end <= i) ++nc;
    if (nc < skip.size() && skip[nc].contains(i)) {
      i = skip[nc].end;
      continue;
    }
    auto c = utf8::decode_at(src, i);
    const std::size_t len = c ? c->length : 1;
    if (c && !utf8::is_whitespace(c->code_point)) {
      while (cov < covered.size() && covered[cov].end <= i) ++cov;
      if (cov == covered.size() || !covered[cov].contains(i)) return Coverage::partial;
    }
    i += len;
  }
  return Coverage::full;
}

TextGranularity compute_granularity(const SegmentedText& text) {
  SegmentKind finest = SegmentKind::file;
  max_kind(text.root(), finest);
  return TextGranularity{finest, coverage_at(text, finest)};
}

std::string reconstruct(const SegmentedText& text) {
  std::string out;
  out.reserve(text.source().size());
  std::size_t cursor = 0;
  for (const auto& path : leaf_segments(text)) {
    const auto& span = segment_at(text, path).span;
    out.append(text.source(), cursor, span.begin - cursor);
    out.append(text.source(), span.begin, span.size());
    cursor = span.end;
  }
  out.append(text.source(), cursor, std::string::npos);
  return out;
}

const Segment& segment_at(const SegmentedText& text, const SegmentPath& path) {
  const Segment* cur = &text.root();
  for (auto idx : path) {
    if (idx >= cur->children.size()) {
      throw Error(ErrorCode::InvalidArgument, "segment path out of range");
    }
    cur = &cur->children[idx];
  }
  return *cur;
}

std::vector<SegmentPath> segments_of_kind(const SegmentedText& text, SegmentKind kind) {
  std::vector<SegmentPath> out;
  SegmentPath path;
  collect_kind(text.root(), kind, path, out);
  return out;
}

std::vector<SegmentPath> leaf_segments(const SegmentedText& text) {
  std::vector<SegmentPath> out;
  SegmentPath path;
  collect_leaves(text.root(), path, out);
  return out;
}

std::string segment_content(const SegmentedText& text, const Segment& segment) {
  const auto& src = text.source();
  std::string raw;
  raw.reserve(segment.span.size());
  std::size_t i = segment.span.begin;
  for (const auto& skip : text.non_content()) {
    if (skip.end <= i) continue;
    if (skip.begin >= segment.span.end) break;
    if (skip.begin > i) raw.append(src, i, skip.begin - i);
    if (text.format() == SourceFormat::plain) raw.push_back(' ');
    i = std::max(i, skip.end);
  }
  if (i < segment.span.end) raw.append(src, i, segment.span.end - i);
  if (text.format() == SourceFormat::plain) return raw;
  return detail::decode_character_references(raw);
}

std::set<LanguageTag> observed_languages(const SegmentedText& text) {
  std::set<LanguageTag> out{text.language()};
  for (const auto& sw : text.switches()) out.insert(sw.language);
  return out;
}

SegmentedText apply_manual_edit(const SegmentedText& text, const ManualEdit& edit) {
  Segment root = text.root();
  const auto& src = text.source();

  auto invalid = [](const std::string& why) { return Error(ErrorCode::InvalidEdit, why); };

  auto parent_and_index = [&](const SegmentPath& path) -> std::pair<Segment*, std::size_t> {
    if (path.empty()) throw invalid("the root segment cannot be edited");
    SegmentPath parent_path(path.begin(), path.end() - 1);
    Segment* parent = nullptr;
    try {
      parent = &mutable_segment_at(root, parent_path);
    } catch (const Error&) {
      throw invalid("segment path out of range");
    }
    if (path.back() >= parent->children.size()) throw invalid("segment path out of range");
    return {parent, path.back()};
  };

  auto partition_children = [&](std::vector<Segment>& children, std::size_t offset,
                                std::vector<Segment>& left, std::vector<Segment>& right) {
    for (auto& c : children) {
      if (c.span.end <= offset) {
        left.push_back(std::move(c));
      } else if (c.span.begin >= offset) {
        right.push_back(std::move(c));
      } else {
        throw invalid("edit offset falls inside a nested segment");
      }
    }
  };

  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        auto [parent, idx] = parent_and_index(e.path);
        if constexpr (std::is_same_v<T, SplitEdit>) {
          Segment& target = parent->children[idx];
          if (e.offset <= target.span.begin || e.offset >= target.span.end) {
            throw invalid("split offset outside the segment");
          }
          if (!utf8::is_boundary(src, e.offset)) throw invalid("split offset inside a character");
          Segment left = target;
          Segment right = target;
          left.children.clear();
          right.children.clear();
          partition_children(target.children, e.offset, left.children, right.children);
          left.span.end = e.offset;
          right.span.begin = e.offset;
          left.origin = right.origin = Origin::manual;
          right.record_uri.reset();
          parent->children[idx] = std::move(left);
          parent->children.insert(parent->children.begin() + static_cast<std::ptrdiff_t>(idx) + 1,
                                  std::move(right));
        } else if constexpr (std::is_same_v<T, MergeEdit>) {
          if (idx + 1 >= parent->children.size()) throw invalid("no next sibling to merge with");
          Segment& a = parent->children[idx];
          Segment& b = parent->children[idx + 1];
          if (a.kind != b.kind) throw invalid("cannot merge segments of different kinds");
          a.span.end = b.span.end;
          for (auto& c : b.children) a.children.push_back(std::move(c));
          a.origin = Origin::manual;
          if (a.record_uri != b.record_uri) a.record_uri.reset();
          parent->children.erase(parent->children.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
        } else {
          if (idx + 1 >= parent->children.size()) throw invalid("no next sibling to move into");
          Segment& a = parent->children[idx];
          Segment& b = parent->children[idx + 1];
          if (e.offset <= a.span.begin || e.offset >= b.span.end) {
            throw invalid("boundary offset outside the two segments");
          }
          if (!utf8::is_boundary(src, e.offset)) throw invalid("boundary offset inside a character");
          std::vector<Segment> all;
          for (auto& c : a.children) all.push_back(std::move(c));
          for (auto& c : b.children) all.push_back(std::move(c));
          a.children.clear();
          b.children.clear();
          partition_children(all, e.offset, a.children, b.children);
          a.span.end = e.offset;
          b.span.begin = e.offset;
          a.origin = b.origin = Origin::manual;
        }
      },
      edit);

  try {
    return SegmentedText(text.language(), src, std::move(root), text.non_content(), text.format(),
                         text.switches());
  } catch (const Error& err) {
    throw Error(ErrorCode::InvalidEdit, err.what(), err.position());
  }
}

SegmentedText with_record_uri(const SegmentedText& text, const SegmentPath& path,
                              std::optional<std::string> uri) {
  Segment root = text.root();
  mutable_segment_at(root, path).record_uri = std::move(uri);
  return SegmentedText(text.language(), text.source(), std::move(root), text.non_content(),
                       text.format(), text.switches());
}

namespace {

using nlohmann::json;

std::string_view format_name(SourceFormat f) {
  switch (f) {
    case SourceFormat::plain: return "plain";
    case SourceFormat::marked: return "marked";
    case SourceFormat::html: return "html";
  }
  return "plain";
}

json segment_to_json(const Segment& s) {
  json j{{"kind", to_string(s.kind)}, {"begin", s.span.begin}, {"end", s.span.end}};
  if (s.record_uri) j["record"] = *s.record_uri;
  if (s.origin == Origin::manual) j["origin"] = "manual";
  if (s.language) j["lang"] = s.language->code();
  if (!s.children.empty()) {
    json children = json::array();
    for (const auto& c : s.children) children.push_back(segment_to_json(c));
    j["children"] = std::move(children);
  }
  return j;
}

Segment segment_from_json(const json& j) {
  Segment s;
  auto kind = parse_segment_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown segment kind in segmentation");
  s.kind = *kind;
  s.span = {j.at("begin").get<std::size_t>(), j.at("end").get<std::size_t>()};
  if (j.contains("record")) s.record_uri = j["record"].get<std::string>();
  if (j.value("origin", "programmatic") == "manual") s.origin = Origin::manual;
  if (j.contains("lang")) s.language = parse_tag(j["lang"].get<std::string>());
  if (j.contains("children")) {
    for (const auto& c : j["children"]) s.children.push_back(segment_from_json(c));
  }
  return s;
}

}  // namespace

std::string serialize_segmentation(const SegmentedText& text) {
  json nc = json::array();
  for (const auto& s : text.non_content()) nc.push_back({s.begin, s.end});
  json sw = json::array();
  for (const auto& s : text.switches()) {
    sw.push_back({{"begin", s.span.begin}, {"end", s.span.end}, {"lang", s.language.code()}});
  }
  json j{{"lang", text.language().code()},
         {"format", format_name(text.format())},
         {"source", text.source()},
         {"root", segment_to_json(text.root())},
         {"non_content", std::move(nc)},
         {"switches", std::move(sw)}};
  return j.dump(1);
}

SegmentedText deserialize_segmentation(std::string_view text) {
  try {
    const auto j = json::parse(text);
    std::vector<Span> nc;
    for (const auto& s : j.at("non_content")) nc.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    std::vector<LanguageSwitch> sw;
    for (const auto& s : j.at("switches")) {
      sw.push_back({{s.at("begin").get<std::size_t>(), s.at("end").get<std::size_t>()},
                    parse_tag(s.at("lang").get<std::string>())});
    }
    const auto fmt = j.at("format").get<std::string>();
    SourceFormat format = fmt == "marked" ? SourceFormat::marked
                          : fmt == "html" ? SourceFormat::html
                                          : SourceFormat::plain;
    return SegmentedText(parse_tag(j.at("lang").get<std::string>()),
                         j.at("source").get<std::string>(), segment_from_json(j.at("root")),
                         std::move(nc), format, std::move(sw));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad segmentation document: ") + e.what());
  }
}

}  // namespace partext
