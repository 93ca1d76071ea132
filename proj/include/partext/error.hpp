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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace partext {

/// Every failure the toolkit reports carries one of these codes so callers
/// (the CLI, the HTTP layer) can map it without parsing messages.
enum class ErrorCode {
  InvalidArgument,
  InvalidEncoding,
  // langtags
  UnknownCode,
  Malformed,
  // segcore
  SeparatorCollision,
  MalformedMarkup,
  InvalidEdit,
  // align
  GranularityUnachievable,
  KindTooFine,
  IllegalCombination,
  VeryMixedUnsupported,
  // lingstore
  NoSuchRecord,
  MalformedTmx,
  UnsupportedTmx,
  MalformedCsv,
  UnknownBase,
  MalformedRecordUri,
  MixedBases,
  Unrepresentable,
  Io,
  // gentext
  MalformedTemplate,
  UnknownRecord,
  MissingLanguage,
  // medbox
  NotAZip,
  MissingHeader,
  InvalidDossier,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(message), code_(code), position_(position) {}

  ErrorCode code() const noexcept { return code_; }

  /// Byte offset into the offending input, when the failure has one.
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> position_;
};

}  // namespace partext
