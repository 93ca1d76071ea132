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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partext/align.hpp"
#include "partext/langtags.hpp"

namespace partext {

namespace zip {

struct Member {
  std::string name;
  std::string data;
  friend bool operator==(const Member&, const Member&) = default;
};

/// Deterministic archive: members sorted by name, DOS timestamps fixed at
/// 1980-01-01 00:00, each member deflated unless storing is smaller.
std::string write(std::vector<Member> members);

/// Stored and deflated members, CRC-checked; directory entries are skipped.
/// Throws NotAZip for anything else, including zip64 and encryption.
std::vector<Member> read(std::string_view archive);

}  // namespace zip

enum class ArtefactRole { translation_memory, background_document, other };

std::string_view to_string(ArtefactRole role) noexcept;
std::optional<ArtefactRole> parse_artefact_role(std::string_view name) noexcept;

/// An auxiliary item, either embedded (`content`) or referenced (`uri`).
struct Artefact {
  ArtefactRole role = ArtefactRole::other;
  /// File name inside `artefacts/<role>/`, or a label for a reference.
  std::string name;
  std::optional<std::string> content;
  std::optional<std::string> uri;

  friend bool operator==(const Artefact&, const Artefact&) = default;
};

/// An original file a linguistic version was made from.
struct SourceFile {
  std::string name;
  std::string content;
  friend bool operator==(const SourceFile&, const SourceFile&) = default;
};

enum class MedForm { self_contained, mix, external_only };
std::string_view to_string(MedForm form) noexcept;

/// Multilingual electronic dossier.
///
/// The header is flat `key: value` metadata and must hold `id` and
/// `languages` (a comma-separated list of labels). Versions live in
/// `parallel`; a version that exists only elsewhere is listed in
/// `external_versions`.
struct MedDossier {
  std::map<std::string, std::string> header;
  ParallelTexts parallel;
  std::map<LanguageTag, std::vector<SourceFile>> sources;
  std::map<LanguageTag, std::string> external_versions;
  std::vector<Artefact> artefacts;

  /// Self-contained when nothing is a URI reference, external-only when
  /// everything is, mix otherwise. A dossier without components is
  /// self-contained.
  MedForm form() const;

  /// Labels listed under `languages`, parsed; throws like parse_tag.
  std::vector<LanguageTag> declared_languages() const;

  /// Artefact order does not matter.
  friend bool operator==(const MedDossier& a, const MedDossier& b);
};

/// Header with `id`, `title` and `languages` filled in.
MedDossier make_dossier(std::string id, std::string title, const std::vector<LanguageTag>& languages);

/// Sets `statistics.versions`, `statistics.groups` and `statistics.artefacts`.
void update_statistics(MedDossier& med);

/// Archive layout:
///
///   index.html                       generated main index
///   header/med.meta                  `key: value` lines, sorted by key
///   parallel/<lang>/text.txt         each version's text
///   parallel/<lang>/<name>           its source files
///   parallel/_segments/<lang>.json   each version's segmentation
///   parallel/_alignment.json         groups, entirety, granularity
///   artefacts/<role>/<name>          embedded artefacts
///   external.links                   `<uri> artefact <role> <name>` or
///                                    `<uri> version <lang>`, one per line
///
/// Throws InvalidDossier when the dossier breaks its invariants.
std::string pack(const MedDossier& med);
std::vector<zip::Member> pack_members(const MedDossier& med);

/// Files outside the layout come back as artefacts of role `other` named by
/// their archive path. Throws NotAZip, MissingHeader or InvalidDossier.
MedDossier unpack(std::string_view archive);
MedDossier unpack_members(const std::vector<zip::Member>& members);

/// Deterministic HTML: header table, one row per language (entirety and a
/// relative link to its text), and the artefacts.
std::string generate_index(const MedDossier& med);

enum class Severity { error, warning };
std::string_view to_string(Severity s) noexcept;

struct LintDiagnostic {
  Severity severity = Severity::error;
  /// Stable identifier of the defect class, e.g. "missing-version".
  std::string code;
  /// Archive path the finding is about; empty for the archive itself.
  std::string member;
  std::string message;
  friend bool operator==(const LintDiagnostic&, const LintDiagnostic&) = default;
};

/// Never throws on bad input: every problem becomes a diagnostic. The
/// result is sorted (member, code) and empty for a clean dossier.
std::vector<LintDiagnostic> validate(std::string_view archive);
std::vector<LintDiagnostic> validate_members(const std::vector<zip::Member>& members);
/// Same checks over an unpacked dossier directory.
std::vector<LintDiagnostic> validate_directory(const std::filesystem::path& directory);

/// Regular files under `directory` as members with `/`-separated names.
std::vector<zip::Member> read_directory(const std::filesystem::path& directory);
/// Writes members below `directory`; refuses names that would escape it.
void write_directory(const std::vector<zip::Member>& members, const std::filesystem::path& directory);

}  // namespace partext
