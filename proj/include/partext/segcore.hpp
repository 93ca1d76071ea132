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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "partext/langtags.hpp"

namespace partext {

/// Segment sizes, coarsest first. The numeric order is the refinement order:
/// a larger value is a finer kind.
enum class SegmentKind : std::uint8_t { file = 0, paragraph = 1, sentence = 2, subsentence = 3 };

std::string_view to_string(SegmentKind kind) noexcept;
std::optional<SegmentKind> parse_segment_kind(std::string_view name) noexcept;

constexpr bool is_finer(SegmentKind a, SegmentKind b) noexcept { return a > b; }
constexpr SegmentKind coarser_of(SegmentKind a, SegmentKind b) noexcept { return a < b ? a : b; }

/// Half-open byte interval into the UTF-8 source.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  bool contains(std::size_t offset) const noexcept { return offset >= begin && offset < end; }
  bool contains(const Span& other) const noexcept {
    return other.begin >= begin && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
};

enum class Origin { programmatic, manual };

struct Segment {
  SegmentKind kind = SegmentKind::file;
  Span span;
  std::vector<Segment> children;
  std::optional<std::string> record_uri;
  Origin origin = Origin::programmatic;
  /// Processing-language switch carried by this segment, if any.
  std::optional<LanguageTag> language;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Child indices from the root; the empty path addresses the root.
using SegmentPath = std::vector<std::size_t>;

enum class Coverage { partial = 0, full = 1 };

struct TextGranularity {
  SegmentKind level = SegmentKind::file;
  Coverage coverage = Coverage::full;

  friend bool operator==(const TextGranularity&, const TextGranularity&) = default;
  /// Lexicographic: level first, then partial < full. The meet of two
  /// granularities is their minimum under this order.
  friend std::strong_ordering operator<=>(const TextGranularity& a, const TextGranularity& b) noexcept {
    if (auto c = a.level <=> b.level; c != 0) return c;
    return a.coverage <=> b.coverage;
  }
};

std::string to_string(const TextGranularity& g);

enum class SourceFormat { plain, marked, html };

struct LanguageSwitch {
  Span span;
  LanguageTag language;
  friend bool operator==(const LanguageSwitch&, const LanguageSwitch&) = default;
};

/// One linguistic version: an immutable source plus a segment tree over it.
///
/// The constructor checks the structural invariants (root covers the source,
/// children ordered, disjoint, contained and strictly finer than their
/// parent, offsets on character boundaries) and computes the granularity.
/// Byte ranges listed as non-content (markup, separators, language-neutral
/// template text) are excluded from coverage and from segment_content().
class SegmentedText {
 public:
  SegmentedText(LanguageTag language, std::string source, Segment root,
                std::vector<Span> non_content = {}, SourceFormat format = SourceFormat::plain,
                std::vector<LanguageSwitch> switches = {});

  const LanguageTag& language() const noexcept { return language_; }
  const std::string& source() const noexcept { return source_; }
  const Segment& root() const noexcept { return root_; }
  const TextGranularity& granularity() const noexcept { return granularity_; }
  const std::vector<Span>& non_content() const noexcept { return non_content_; }
  SourceFormat format() const noexcept { return format_; }
  const std::vector<LanguageSwitch>& switches() const noexcept { return switches_; }
  bool language_neutral() const noexcept { return language_.is_neutral(); }

  friend bool operator==(const SegmentedText& a, const SegmentedText& b) {
    return a.language_ == b.language_ && a.source_ == b.source_ && a.root_ == b.root_ &&
           a.non_content_ == b.non_content_ && a.format_ == b.format_ &&
           a.switches_ == b.switches_;
  }

 private:
  LanguageTag language_;
  std::string source_;
  Segment root_;
  std::vector<Span> non_content_;
  SourceFormat format_;
  std::vector<LanguageSwitch> switches_;
  TextGranularity granularity_;
};

struct SegmentationPolicy {
  /// ECMAScript regular expression matched against the source; every match
  /// separates two paragraphs. The default is a blank line.
  std::string paragraph_indicator = R"(\n[ \t\r\f\v]*\n)";
  /// An indicator ends a sentence when followed by whitespace and then an
  /// uppercase letter or a digit, or by the end of the paragraph.
  std::u32string sentence_indicators = U".;!?";
  /// Marks sub-sentence boundaries; must not be a natural-language character.
  char32_t separator = U'\x1E';
  /// When false the separator is ordinary text and no sub-sentence
  /// segmentation happens.
  bool honor_markup = true;
};

/// Segments plain text down to `target` by indicators and separators.
///
/// `xx` input yields a bare file segment whatever the policy. Multilingual
/// (`mm`) input is rejected with InvalidArgument; split it first.
/// Throws SeparatorCollision when the separator is whitespace, a letter or
/// digit, or one of the sentence indicators.
SegmentedText segment_text(std::string_view text, const LanguageTag& language,
                           const SegmentationPolicy& policy = {},
                           SegmentKind target = SegmentKind::sentence);

/// Mirrors the element tree of a marked document.
///
/// Dialect: any root element is the file segment; `p`, `s` and `sub` are
/// paragraph, sentence and sub-sentence segments; other elements are
/// transparent inline markup. `xml:lang` on any element records a
/// processing-language switch. `rec` holds a record identifier (`r1`) that
/// is resolved against the root's `base` attribute, or an absolute URI.
/// Throws MalformedMarkup with the byte position of the failure.
SegmentedText segment_marked(std::string_view document);

/// HTML subset: tags are markup, block elements delimit paragraphs, and
/// sentences/sub-sentences follow the same rules as plain text.
SegmentedText segment_html(std::string_view html, const LanguageTag& language,
                           const SegmentationPolicy& policy = {},
                           SegmentKind target = SegmentKind::sentence);

/// Best-effort RTF filter: drops control words and destinations, maps \par
/// to paragraph breaks and \'hh escapes through Latin-1.
std::string rtf_to_text(std::string_view rtf);

/// Finest level present in the tree and whether all content is covered there.
TextGranularity compute_granularity(const SegmentedText& text);

/// Whether every content character lies in a segment of `level` or finer.
Coverage coverage_at(const SegmentedText& text, SegmentKind level);

/// Leaf spans interleaved with the residue between them.
std::string reconstruct(const SegmentedText& text);

const Segment& segment_at(const SegmentedText& text, const SegmentPath& path);

/// Paths of all segments of `kind`, in document order.
std::vector<SegmentPath> segments_of_kind(const SegmentedText& text, SegmentKind kind);

/// Paths of all leaf segments, in document order.
std::vector<SegmentPath> leaf_segments(const SegmentedText& text);

/// Text of a segment without its non-content ranges. Separators become a
/// space; markup is dropped and character references are decoded.
std::string segment_content(const SegmentedText& text, const Segment& segment);

/// Languages named by processing-language switches plus the text's own
/// language.
std::set<LanguageTag> observed_languages(const SegmentedText& text);

struct SplitEdit {
  SegmentPath path;
  std::size_t offset = 0;
};

/// Merges the addressed segment with its next sibling.
struct MergeEdit {
  SegmentPath path;
};

/// Moves the boundary between the addressed segment and its next sibling.
struct MoveBoundaryEdit {
  SegmentPath path;
  std::size_t offset = 0;
};

using ManualEdit = std::variant<SplitEdit, MergeEdit, MoveBoundaryEdit>;

/// Applies a human correction; touched segments get Origin::manual.
/// Throws InvalidEdit when the edit would break nesting or losslessness.
SegmentedText apply_manual_edit(const SegmentedText& text, const ManualEdit& edit);

SegmentedText with_record_uri(const SegmentedText& text, const SegmentPath& path,
                              std::optional<std::string> uri);

/// JSON form of a segmented text (source, tree, non-content ranges and
/// switches), used for segmentation sidecars.
std::string serialize_segmentation(const SegmentedText& text);
SegmentedText deserialize_segmentation(std::string_view json);

}  // namespace partext
