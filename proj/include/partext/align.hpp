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

#include <initializer_list>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "partext/langtags.hpp"
#include "partext/segcore.hpp"

namespace partext {

enum class Entirety { complete, partial, summary, translating, machine, suspended, undefined };

std::string_view to_string(Entirety e) noexcept;
std::optional<Entirety> parse_entirety(std::string_view name) noexcept;

/// Declared completeness state of one linguistic version. Attributes can be
/// combined, except that `undefined` stands alone and `complete` rules out
/// `partial` and `summary`.
class EntiretySet {
 public:
  /// Throws IllegalCombination.
  explicit EntiretySet(std::set<Entirety> attributes);
  EntiretySet(std::initializer_list<Entirety> attributes) : EntiretySet(std::set<Entirety>(attributes)) {}

  /// Comma-separated attribute names, e.g. "summary,machine".
  static EntiretySet parse(std::string_view text);

  const std::set<Entirety>& attributes() const noexcept { return attributes_; }
  bool contains(Entirety e) const noexcept { return attributes_.contains(e); }
  std::string to_string() const;

  friend bool operator==(const EntiretySet&, const EntiretySet&) = default;

 private:
  std::set<Entirety> attributes_;
};

/// One line of the alignment: at most one segment per language, all of the
/// same kind. A language missing from `members` is a broken line.
struct AlignmentGroup {
  SegmentKind kind = SegmentKind::file;
  std::map<LanguageTag, SegmentPath> members;

  friend bool operator==(const AlignmentGroup&, const AlignmentGroup&) = default;
};

struct ParallelTexts {
  std::map<LanguageTag, SegmentedText> versions;
  std::vector<AlignmentGroup> groups;
  std::map<LanguageTag, EntiretySet> entirety;
  TextGranularity granularity;
  /// Where the versions came from; copied into harvested records.
  std::string provenance;

  friend bool operator==(const ParallelTexts&, const ParallelTexts&) = default;
};

/// Meet of the granularity lattice (coarsest level, then partial before full).
TextGranularity parallel_granularity(const std::vector<TextGranularity>& granularities);
inline TextGranularity parallel_granularity(std::initializer_list<TextGranularity> granularities) {
  return parallel_granularity(std::vector<TextGranularity>(granularities));
}

/// Coarsest level among the versions; coverage is full only when every
/// version is fully covered at that level.
TextGranularity parallel_granularity(const std::map<LanguageTag, SegmentedText>& versions);

/// Positional 1:1 alignment at `kind`, coarsening one level at a time while
/// the per-version segment counts disagree. At file level the roots of all
/// non-empty versions form the single group.
///
/// Throws InvalidArgument for fewer than two versions,
/// GranularityUnachievable when every version is empty, and KindTooFine
/// when `kind` is finer than the granularity of every version.
ParallelTexts align(const std::map<LanguageTag, SegmentedText>& versions, SegmentKind kind,
                    std::string provenance = {});

/// Throws IllegalCombination (through EntiretySet) for contradictory sets.
ParallelTexts set_entirety(const ParallelTexts& pt, const LanguageTag& language, EntiretySet attributes);

/// Projects a serial multilingual text onto its languages. Paragraphs (or
/// the whole file when it has none) are assigned the language of the
/// innermost switch enclosing them; `xx` paragraphs go to every projection.
/// Each projection shares the original source and marks the paragraphs of
/// other languages as non-content.
///
/// Throws VeryMixedUnsupported when a switch to another language occurs
/// inside a paragraph, and InvalidArgument when a paragraph has no
/// determinable language.
std::map<LanguageTag, SegmentedText> split_multilingual(const SegmentedText& text);

struct ConsistencyDiagnostic {
  std::size_t group_index = 0;
  std::string message;
};

/// Compares, group by group, the `language` member of `pt` with the
/// corresponding segment of the multilingual projection after whitespace
/// normalization. Groups the projection does not reach are reported too.
std::vector<ConsistencyDiagnostic> check_multilingual_consistency(const ParallelTexts& pt,
                                                                  const SegmentedText& projection,
                                                                  const LanguageTag& language);

/// Normalized content of a group member.
std::string member_text(const ParallelTexts& pt, const AlignmentGroup& group, const LanguageTag& language);

}  // namespace partext
