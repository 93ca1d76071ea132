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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "partext/align.hpp"
#include "partext/error.hpp"
#include "partext/lingstore.hpp"

namespace partext {

/// `{rN}` or `{table#rN}`. An empty `table` means the default base; any
/// other value is an alias declared in the template or a base URI.
struct Placeholder {
  std::string table;
  RecordId id = 0;
  friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

/// Boilerplate that exists only in some languages (`{lang:en}...{/lang}`).
struct LanguageLiterals {
  std::map<LanguageTag, std::string> text;
  friend bool operator==(const LanguageLiterals&, const LanguageLiterals&) = default;
};

/// A plain string is language-neutral literal text.
using TemplatePart = std::variant<std::string, Placeholder, LanguageLiterals>;

struct DocumentTemplate {
  std::string name;
  std::vector<TemplatePart> parts;
  /// Declared with `{base:URI}`.
  std::optional<std::string> default_base;
  /// Declared with `{base:alias URI}`.
  std::map<std::string, std::string> aliases;

  std::size_t placeholder_count() const;
  friend bool operator==(const DocumentTemplate&, const DocumentTemplate&) = default;
};

/// Template syntax:
///
///   {rN}                 placeholder for record N of the default table
///   {alias#rN}           placeholder for record N of another table
///   {base:URI}           default base URI
///   {base:alias URI}     names another base
///   {lang:xx}...{/lang}  literal text for one language only
///   {{  }}               literal braces
///
/// Throws MalformedTemplate with the byte position.
DocumentTemplate parse_template(std::string_view text, std::string name = "template");

struct GenerationFailure {
  ErrorCode code = ErrorCode::UnknownRecord;  // UnknownRecord or MissingLanguage
  std::string base;
  RecordId id = 0;
  LanguageTag language = LanguageTag::from_valid_code("un");
  friend bool operator==(const GenerationFailure&, const GenerationFailure&) = default;
};

/// Carries every failure found, not only the first. code() is UnknownRecord
/// when any record is unknown, MissingLanguage otherwise.
class GenerationError : public Error {
 public:
  explicit GenerationError(std::vector<GenerationFailure> failures);
  const std::vector<GenerationFailure>& failures() const noexcept { return failures_; }

 private:
  std::vector<GenerationFailure> failures_;
};

/// One linguistic version. Every placeholder becomes a sentence segment
/// carrying its record URI; literal text is non-content. Each placeholder
/// counts as one use of its record, bumped only when generation succeeds.
///
/// Unqualified placeholders use the template's default base, or the only
/// table when the registry holds one. Throws GenerationError, UnknownBase,
/// or InvalidArgument for a non-standard language.
SegmentedText generate(const DocumentTemplate& tmpl, const TableRegistry& tables, const LanguageTag& language);

/// Single-table form; the table is registered under the template's default
/// base, or under its own name when the template declares none.
SegmentedText generate(const DocumentTemplate& tmpl, LinguisticTable& table, const LanguageTag& language);

/// All versions at once; one alignment group per placeholder. A version
/// missing some segments is still produced, without them, and marked
/// partial. Throws GenerationError when a record is unknown or no version
/// is complete. `failures`, when given, receives the missing segments.
ParallelTexts generate_all(const DocumentTemplate& tmpl, const TableRegistry& tables,
                           const std::set<LanguageTag>& languages,
                           std::vector<GenerationFailure>* failures = nullptr);
ParallelTexts generate_all(const DocumentTemplate& tmpl, LinguisticTable& table,
                           const std::set<LanguageTag>& languages,
                           std::vector<GenerationFailure>* failures = nullptr);

}  // namespace partext
