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

#include <string>
#include <string_view>
#include <vector>

#include "partext/lingstore.hpp"

namespace partext::detail {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

/// RFC 4180 reader; accepts LF or CRLF. Throws MalformedCsv.
std::vector<CsvRow> parse_csv(std::string_view text);
void append_csv_field(std::string& out, std::string_view field);

/// Table to CSV including the bookkeeping columns used for persistence.
std::string write_table_csv(const std::vector<LinguisticRecord>& records, const std::vector<LanguageTag>& languages,
                            bool with_meta);
/// Inserts the rows into `table`, keeping their ids.
void read_table_csv(std::string_view text, const std::optional<std::vector<std::string>>& header,
                    LinguisticTable& table);

}  // namespace partext::detail
