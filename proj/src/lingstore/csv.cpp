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
#include <array>
#include <charconv>

#include "lingstore_internal.hpp"
#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace detail {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  const std::size_t n = text.size();
  auto fail = [&](const std::string& what) -> void {
    throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": " + what, i);
  };

  while (i < n) {
    CsvRow row;
    row.line = line;
    while (true) {
      std::string field;
      if (i < n && text[i] == '"') {
        ++i;
        while (true) {
          if (i >= n) fail("unterminated quoted field");
          if (text[i] == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
        if (i < n && text[i] != ',' && text[i] != '\n' && !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
          fail("text after closing quote");
        }
      } else {
        while (i < n && text[i] != ',' && text[i] != '\n' && !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
          if (text[i] == '"') fail("quote inside unquoted field");
          field += text[i++];
        }
      }
      row.fields.push_back(std::move(field));
      if (i < n && text[i] == ',') {
        ++i;
        continue;
      }
      break;
    }
    if (i < n && text[i] == '\r') ++i;
    if (i < n && text[i] == '\n') {
      ++i;
      ++line;
    }
    const bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

void append_csv_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

namespace {

constexpr std::array<std::string_view, 7> kMetaColumns{"@domain", "@source_link", "@reads", "@uses",
                                                       "@override", "@prov_table", "@prov_id"};

template <typename T>
T parse_number(const std::string& text, std::size_t line, std::string_view column) {
  T value{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw Error(ErrorCode::MalformedCsv,
                "line " + std::to_string(line) + ": bad " + std::string(column) + " value '" + text + "'");
  }
  return value;
}

}  // namespace

std::string write_table_csv(const std::vector<LinguisticRecord>& records, const std::vector<LanguageTag>& languages,
                            bool with_meta) {
  std::string out = "id";
  for (const auto& lang : languages) out += "," + lang.code();
  if (with_meta) {
    for (auto col : kMetaColumns) {
      out += ',';
      out += col;
    }
  }
  out += '\n';
  for (const auto& r : records) {
    bool any = false;
    for (const auto& lang : languages) any = any || r.segments.contains(lang);
    if (!any) continue;
    out += std::to_string(r.id);
    for (const auto& lang : languages) {
      out += ',';
      if (auto it = r.segments.find(lang); it != r.segments.end()) append_csv_field(out, it->second);
    }
    if (with_meta) {
      auto opt = [&](const std::optional<std::string>& v) {
        out += ',';
        if (v) append_csv_field(out, *v);
      };
      opt(r.domain);
      opt(r.source_link);
      out += ',' + std::to_string(r.value.reads);
      out += ',' + std::to_string(r.value.uses);
      out += ',';
      if (r.value.manual_override) out += format_double(*r.value.manual_override);
      opt(r.provenance ? std::optional<std::string>(r.provenance->table) : std::nullopt);
      out += ',';
      if (r.provenance) out += std::to_string(r.provenance->id);
    }
    out += '\n';
  }
  return out;
}

void read_table_csv(std::string_view text, const std::optional<std::vector<std::string>>& header,
                    LinguisticTable& table) {
  if (auto bad = utf8::find_invalid(text)) throw Error(ErrorCode::MalformedCsv, "input is not valid UTF-8", *bad);
  auto rows = parse_csv(text);
  std::vector<std::string> columns;
  std::size_t first = 0;
  if (header) {
    columns = *header;
  } else {
    if (rows.empty()) throw Error(ErrorCode::MalformedCsv, "missing header line");
    columns = rows[0].fields;
    first = 1;
  }
  if (columns.empty() || columns[0] != "id") throw Error(ErrorCode::MalformedCsv, "first column must be 'id'");

  std::vector<std::optional<LanguageTag>> langs(columns.size());
  std::set<std::string> seen;
  for (std::size_t c = 1; c < columns.size(); ++c) {
    const auto& name = columns[c];
    if (!seen.insert(name).second) throw Error(ErrorCode::MalformedCsv, "duplicate column '" + name + "'");
    if (!name.empty() && name[0] == '@') {
      if (std::find(kMetaColumns.begin(), kMetaColumns.end(), name) == kMetaColumns.end()) {
        throw Error(ErrorCode::MalformedCsv, "unknown column '" + name + "'");
      }
      continue;
    }
    auto tag = try_parse_tag(name);
    if (!tag) throw Error(ErrorCode::MalformedCsv, "column '" + name + "' is not a language code");
    langs[c] = *tag;
  }

  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto line = row.line;
    if (row.fields.size() != columns.size()) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": expected " +
                                               std::to_string(columns.size()) + " fields, found " +
                                               std::to_string(row.fields.size()));
    }
    LinguisticRecord rec;
    rec.id = parse_number<RecordId>(row.fields[0], line, "id");
    if (rec.id == 0) throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": id must be positive");
    if (table.contains(rec.id)) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": duplicate id " + row.fields[0]);
    }
    for (std::size_t c = 1; c < columns.size(); ++c) {
      const auto& value = row.fields[c];
      if (langs[c]) {
        if (!value.empty()) rec.segments.emplace(*langs[c], value);
        continue;
      }
      if (value.empty()) continue;
      const auto& col = columns[c];
      if (col == "@domain") {
        rec.domain = value;
      } else if (col == "@source_link") {
        rec.source_link = value;
      } else if (col == "@reads") {
        rec.value.reads = parse_number<std::uint64_t>(value, line, col);
      } else if (col == "@uses") {
        rec.value.uses = parse_number<std::uint64_t>(value, line, col);
      } else if (col == "@override") {
        rec.value.manual_override = parse_number<double>(value, line, col);
      } else if (col == "@prov_table") {
        if (!rec.provenance) rec.provenance.emplace();
        rec.provenance->table = value;
      } else if (col == "@prov_id") {
        if (!rec.provenance) rec.provenance.emplace();
        rec.provenance->id = parse_number<RecordId>(value, line, col);
      }
    }
    if (rec.segments.empty()) {
      throw Error(ErrorCode::MalformedCsv, "line " + std::to_string(line) + ": record has no segments");
    }
    table.insert_with_id(std::move(rec));
  }
}

}  // namespace detail

std::string export_csv(const LinguisticTable& table, const std::set<LanguageTag>& languages) {
  const auto langs = languages.empty() ? table.languages() : languages;
  return detail::write_table_csv(table.records(), std::vector<LanguageTag>(langs.begin(), langs.end()), false);
}

LinguisticTable import_csv(std::string_view csv, const std::optional<std::vector<std::string>>& header) {
  LinguisticTable table("imported");
  detail::read_table_csv(csv, header, table);
  return table;
}

}  // namespace partext
