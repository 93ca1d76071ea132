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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace partext {

/// Classification of a two-letter language label. The three non-standard
/// kinds extend the ISO 639-1 list with `mm`, `un` and `xx`.
enum class TagKind { standard, multilingual, undetermined, no_linguistic_content };

std::string_view to_string(TagKind kind) noexcept;

class LanguageTag {
 public:
  /// Builds a tag from an already-validated lowercase code. Prefer parse_tag.
  static LanguageTag from_valid_code(std::string_view code);

  const std::string& code() const noexcept { return code_; }
  TagKind kind() const noexcept { return kind_; }

  bool is_standard() const noexcept { return kind_ == TagKind::standard; }
  bool is_multilingual() const noexcept { return kind_ == TagKind::multilingual; }
  bool is_neutral() const noexcept { return kind_ == TagKind::no_linguistic_content; }

  friend bool operator==(const LanguageTag& a, const LanguageTag& b) noexcept {
    return a.code_ == b.code_;
  }
  friend std::strong_ordering operator<=>(const LanguageTag& a, const LanguageTag& b) noexcept {
    return a.code_ <=> b.code_;
  }

 private:
  LanguageTag(std::string code, TagKind kind) : code_(std::move(code)), kind_(kind) {}

  std::string code_;
  TagKind kind_;
};

/// Parses a two-letter label, case-insensitively.
///
/// Throws Error(Malformed) when the input is not exactly two ASCII letters and
/// Error(UnknownCode) when it is not in the embedded ISO 639-1 snapshot nor
/// one of `mm`, `un`, `xx`.
LanguageTag parse_tag(std::string_view raw);

/// Non-throwing variant.
std::optional<LanguageTag> try_parse_tag(std::string_view raw);

/// Parses a comma-separated list such as "en,es". Empty items are skipped.
std::vector<LanguageTag> parse_tag_list(std::string_view raw);

/// English reference name of the language ("Malayalam" for `ml`), or an
/// empty view for the non-standard codes.
std::string_view language_name(const LanguageTag& tag);

/// Number of entries in the embedded ISO 639-1 snapshot.
std::size_t iso639_1_size() noexcept;
std::span<const std::string_view> iso639_1_codes() noexcept;

struct FileLanguageMetadata {
  /// Languages of the file, in declaration order, without duplicates.
  std::vector<LanguageTag> declared;
  std::optional<LanguageTag> default_processing_language;

  /// A file whose language is explicitly unknown: declares `un`.
  static FileLanguageMetadata undetermined();

  /// declared is non-empty, duplicate-free and, when `un` is present, `un`
  /// is the only entry.
  bool is_valid() const;
};

enum class LabellingIssue {
  undeclared_language,   // present in content, missing from the labels
  declared_but_absent,   // labelled but not found in content
  malayalam_misuse,      // `ml` used to mean "multilingual"
};

struct LabellingDiagnostic {
  LabellingIssue issue;
  LanguageTag language;
  std::string message;
};

/// Compares a file's declared labels with the languages observed in its
/// content (typically the processing-language switches of a marked file).
///
/// `un` and `xx` never produce a mismatch on either side. A declared `mm` is
/// satisfied when two or more standard languages are observed. A declared `ml`
/// with more than one observed language is reported once as a Malayalam
/// misuse; the labels then meant "several languages", so undeclared-language
/// diagnostics are not emitted on top of it.
std::vector<LabellingDiagnostic> check_labelling(const FileLanguageMetadata& meta,
                                                 const std::set<LanguageTag>& observed);

}  // namespace partext
