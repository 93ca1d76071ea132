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

#include <charconv>

#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"

namespace partext {

std::pair<std::string, RecordId> split_record_uri(std::string_view uri) {
  const auto slash = uri.rfind('/');
  if (slash == std::string_view::npos || slash == 0) {
    throw Error(ErrorCode::MalformedRecordUri, "'" + std::string(uri) + "' has no base");
  }
  const auto tail = uri.substr(slash + 1);
  RecordId id = 0;
  bool ok = tail.size() >= 2 && tail[0] == 'r' && tail[1] >= '0' && tail[1] <= '9';
  if (ok) {
    auto [p, ec] = std::from_chars(tail.data() + 1, tail.data() + tail.size(), id);
    ok = ec == std::errc() && p == tail.data() + tail.size() && id > 0;
  }
  if (!ok) throw Error(ErrorCode::MalformedRecordUri, "'" + std::string(uri) + "' does not end in /rN");
  return {std::string(uri.substr(0, slash)), id};
}

std::string record_uri(std::string_view base, RecordId id) {
  return std::string(base) + "/r" + std::to_string(id);
}

LinguisticRecord resolve_record_uri(std::string_view uri, const TableRegistry& registry) {
  auto [base, id] = split_record_uri(uri);
  auto it = registry.find(base);
  if (it == registry.end() || !it->second) throw Error(ErrorCode::UnknownBase, "no table registered for '" + base + "'");
  auto record = it->second->find(id);
  if (!record) throw Error(ErrorCode::NoSuchRecord, "no record " + std::to_string(id) + " in '" + base + "'");
  return *record;
}

std::vector<std::vector<RecordId>> match_segments(const LinguisticTable& database, const SegmentedText& doc,
                                                  double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be in (0, 1]");
  std::vector<std::vector<RecordId>> out;
  for (const auto& path : leaf_segments(doc)) {
    const auto text = utf8::normalize_whitespace(segment_content(doc, segment_at(doc, path)));
    auto& ids = out.emplace_back();
    if (text.empty()) continue;
    if (threshold >= 1.0) {
      for (const auto& r : database.lookup_exact(doc.language(), text)) ids.push_back(r.id);
    } else {
      for (const auto& m : database.lookup_fuzzy(doc.language(), text, threshold)) ids.push_back(m.id);
    }
  }
  return out;
}

LinguisticTable build_tm(const LinguisticTable& database, const std::vector<std::vector<RecordId>>& matches,
                         const LanguageTag& source, const std::set<LanguageTag>& targets) {
  const auto db_name = database.name();
  LinguisticTable tm(db_name);
  for (const auto& ids : matches) {
    for (RecordId id : ids) {
      if (tm.contains(id)) continue;
      auto rec = database.find(id);
      if (!rec) continue;
      LinguisticRecord copy = *rec;
      std::erase_if(copy.segments, [&](const auto& kv) { return kv.first != source && !targets.contains(kv.first); });
      bool has_target = false;
      for (const auto& t : targets) has_target = has_target || copy.segments.contains(t);
      if (!has_target) continue;
      copy.provenance = Provenance{db_name, id};
      tm.insert_with_id(std::move(copy));
    }
  }
  return tm;
}

LinguisticTable extract_tm(const LinguisticTable& database, const SegmentedText& doc,
                           const std::set<LanguageTag>& targets, double threshold) {
  return build_tm(database, match_segments(database, doc, threshold), doc.language(), targets);
}

std::size_t harvest(const ParallelTexts& pt, LinguisticTable& table) {
  std::size_t appended = 0;
  for (std::size_t g = 0; g < pt.groups.size(); ++g) {
    const auto& group = pt.groups[g];
    LinguisticRecord rec;
    for (const auto& [lang, path] : group.members) {
      const auto& version = pt.versions.at(lang);
      auto text = segment_content(version, segment_at(version, path));
      if (utf8::normalize_whitespace(text).empty()) continue;
      rec.segments.emplace(lang, std::move(text));
    }
    if (rec.segments.size() < 2) continue;
    if (!pt.provenance.empty()) rec.source_link = pt.provenance + "#g" + std::to_string(g);
    const auto before = table.size();
    table.insert(std::move(rec));
    if (table.size() > before) ++appended;
  }
  return appended;
}

}  // namespace partext
