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

#include "partext/error.hpp"

namespace partext {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidEncoding: return "InvalidEncoding";
    case ErrorCode::UnknownCode: return "UnknownCode";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::SeparatorCollision: return "SeparatorCollision";
    case ErrorCode::MalformedMarkup: return "MalformedMarkup";
    case ErrorCode::InvalidEdit: return "InvalidEdit";
    case ErrorCode::GranularityUnachievable: return "GranularityUnachievable";
    case ErrorCode::KindTooFine: return "KindTooFine";
    case ErrorCode::IllegalCombination: return "IllegalCombination";
    case ErrorCode::VeryMixedUnsupported: return "VeryMixedUnsupported";
    case ErrorCode::NoSuchRecord: return "NoSuchRecord";
    case ErrorCode::MalformedTmx: return "MalformedTmx";
    case ErrorCode::UnsupportedTmx: return "UnsupportedTmx";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::UnknownBase: return "UnknownBase";
    case ErrorCode::MalformedRecordUri: return "MalformedRecordUri";
    case ErrorCode::MixedBases: return "MixedBases";
    case ErrorCode::Unrepresentable: return "Unrepresentable";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedTemplate: return "MalformedTemplate";
    case ErrorCode::UnknownRecord: return "UnknownRecord";
    case ErrorCode::MissingLanguage: return "MissingLanguage";
    case ErrorCode::NotAZip: return "NotAZip";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::InvalidDossier: return "InvalidDossier";
  }
  return "Unknown";
}

}  // namespace partext
