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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "partext/medbox.hpp"

namespace partext::detail {

struct HeaderParse {
  std::map<std::string, std::string> fields;
  /// (diagnostic code, message)
  std::vector<std::pair<std::string, std::string>> problems;
};

/// `key: value` lines; blank lines and `#` comments are skipped.
HeaderParse parse_header(std::string_view text);
bool valid_header_key(std::string_view key);

bool safe_member_name(std::string_view name);
bool well_formed_uri(std::string_view uri);

std::string percent_encode_path(std::string_view path);
std::optional<std::string> percent_decode(std::string_view text);

/// Throws InvalidDossier for a malformed document or dangling group member.
ParallelTexts alignment_from_json(std::string_view text, const std::map<LanguageTag, SegmentedText>& versions);

struct ExternalLink {
  std::string uri;
  std::optional<LanguageTag> language;  // set for versions
  std::optional<ArtefactRole> role;     // set for artefacts
  std::string name;
};

/// With `problems` null a bad line throws InvalidDossier; otherwise it is
/// reported there and skipped. URIs are not checked here.
std::vector<ExternalLink> parse_external_links(std::string_view text, std::vector<std::string>* problems);

}  // namespace partext::detail
