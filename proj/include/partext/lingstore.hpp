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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "partext/align.hpp"
#include "partext/langtags.hpp"
#include "partext/segcore.hpp"

namespace partext {

using RecordId = std::uint64_t;

namespace detail {

/// Readers/writer lock that lets a waiting writer in ahead of newly
/// arriving readers, so a steady stream of lookups cannot starve inserts.
class WriterPreferringMutex {
 public:
  void lock() {
    std::lock_guard gate(gate_);
    rw_.lock();
  }
  bool try_lock() {
    if (!gate_.try_lock()) return false;
    const bool ok = rw_.try_lock();
    gate_.unlock();
    return ok;
  }
  void unlock() { rw_.unlock(); }

  void lock_shared() {
    { std::lock_guard gate(gate_); }
    rw_.lock_shared();
  }
  bool try_lock_shared() {
    if (!gate_.try_lock()) return false;
    gate_.unlock();
    return rw_.try_lock_shared();
  }
  void unlock_shared() { rw_.unlock_shared(); }

 private:
  std::mutex gate_;
  std::shared_mutex rw_;
};

}  // namespace detail

/// Usage accounting. A use weighs ten reads; a manual override, when set,
/// replaces the computed value.
struct RecordValue {
  std::uint64_t reads = 0;
  std::uint64_t uses = 0;
  std::optional<double> manual_override;

  double effective() const noexcept {
    return manual_override ? *manual_override : static_cast<double>(uses) * 10.0 + static_cast<double>(reads);
  }
  friend bool operator==(const RecordValue&, const RecordValue&) = default;
};

enum class ValueEvent { read, use };

/// Origin of a record copied out of another table.
struct Provenance {
  std::string table;
  RecordId id = 0;
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LinguisticRecord {
  RecordId id = 0;
  std::map<LanguageTag, std::string> segments;
  std::optional<std::string> domain;
  std::optional<std::string> source_link;
  RecordValue value;
  std::optional<Provenance> provenance;

  friend bool operator==(const LinguisticRecord&, const LinguisticRecord&) = default;
};

struct ScoredMatch {
  RecordId id = 0;
  double score = 0.0;
  friend bool operator==(const ScoredMatch&, const ScoredMatch&) = default;
};

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// Distance if it is at most `bound`, otherwise any value above `bound`.
std::size_t bounded_edit_distance(std::u32string_view a, std::u32string_view b, std::size_t bound);

/// 1 - d / max(|a|, |b|) over whitespace-normalized code points; 1 for two
/// empty strings.
double similarity(std::string_view a, std::string_view b);

/// A table of parallel records with an exact index and a trigram index per
/// language. Readers run concurrently; writers are serialized. Every public
/// method takes the lock itself and returns copies.
class LinguisticTable {
 public:
  explicit LinguisticTable(std::string name = "table");
  LinguisticTable(const LinguisticTable& other);
  LinguisticTable& operator=(const LinguisticTable& other);
  LinguisticTable(LinguisticTable&& other) noexcept;
  LinguisticTable& operator=(LinguisticTable&& other) noexcept;

  std::string name() const;
  void set_name(std::string name);

  /// Assigns the next free id, or returns the id of an existing record with
  /// the same (whitespace-normalized) segment map. Throws InvalidArgument
  /// for a record without segments.
  RecordId insert(LinguisticRecord record);

  /// Inserts under `record.id`. Throws InvalidArgument when the id is 0 or
  /// taken, or the record has no segments.
  void insert_with_id(LinguisticRecord record);

  std::optional<LinguisticRecord> find(RecordId id) const;
  bool contains(RecordId id) const;
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  /// All records in id order.
  std::vector<LinguisticRecord> records() const;
  std::set<LanguageTag> languages() const;
  /// Incremented by every mutation.
  std::uint64_t version() const;

  /// Records whose `language` segment equals `text` after whitespace
  /// normalization, by value descending then id ascending.
  std::vector<LinguisticRecord> lookup_exact(const LanguageTag& language, std::string_view text) const;

  /// Matches with similarity >= threshold, by score descending, value
  /// descending, id ascending. Throws InvalidArgument unless threshold is in
  /// (0, 1].
  std::vector<ScoredMatch> lookup_fuzzy(const LanguageTag& language, std::string_view text, double threshold) const;

  /// Throws NoSuchRecord.
  RecordValue bump_value(RecordId id, ValueEvent event);
  /// Throws NoSuchRecord, or InvalidArgument for a negative override.
  RecordValue set_manual_value(RecordId id, std::optional<double> value);

  friend bool operator==(const LinguisticTable& a, const LinguisticTable& b);

 private:
  struct Posting {
    RecordId id;
    std::uint32_t count;
  };
  struct LanguageIndex {
    std::unordered_map<std::string, std::set<RecordId>> exact;
    std::unordered_map<std::uint64_t, std::vector<Posting>> trigrams;
    std::map<std::size_t, std::set<RecordId>> by_length;
    std::unordered_map<RecordId, std::u32string> normalized;
  };

  void index_locked(const LinguisticRecord& record);
  std::string dedup_key(const LinguisticRecord& record) const;
  void check_record(const LinguisticRecord& record) const;
  void sort_by_value_locked(std::vector<RecordId>& ids) const;

  mutable detail::WriterPreferringMutex mutex_;
  std::string name_;
  std::map<RecordId, LinguisticRecord> records_;
  std::map<LanguageTag, LanguageIndex> indexes_;
  std::unordered_map<std::string, RecordId> dedup_;
  std::uint64_t version_ = 0;
};

using TableRegistry = std::map<std::string, std::shared_ptr<LinguisticTable>>;

/// Resolves `base/rN`. Throws MalformedRecordUri, UnknownBase or NoSuchRecord.
LinguisticRecord resolve_record_uri(std::string_view uri, const TableRegistry& registry);

/// Splits `base/rN` into its parts. Throws MalformedRecordUri.
std::pair<std::string, RecordId> split_record_uri(std::string_view uri);
std::string record_uri(std::string_view base, RecordId id);

/// Per leaf segment (document order), the ids matching it at `threshold`
/// (exact lookup when threshold is 1). Empty segments get an empty list.
std::vector<std::vector<RecordId>> match_segments(const LinguisticTable& database, const SegmentedText& doc,
                                                  double threshold);

/// Copies the listed records that carry at least one target language,
/// keeping only the source and target segments, the original ids and a
/// provenance pointing back to `database`.
LinguisticTable build_tm(const LinguisticTable& database, const std::vector<std::vector<RecordId>>& matches,
                         const LanguageTag& source, const std::set<LanguageTag>& targets);

/// Small translation memory for one document: match_segments + build_tm.
LinguisticTable extract_tm(const LinguisticTable& database, const SegmentedText& doc,
                           const std::set<LanguageTag>& targets, double threshold);

/// Appends one record per alignment group with at least two non-empty
/// members; returns how many were new.
std::size_t harvest(const ParallelTexts& pt, LinguisticTable& table);

/// TMX 1.4b with plain segments. Records without any of `languages` are
/// skipped; an empty set exports every language.
std::string export_tmx(const LinguisticTable& table, const std::set<LanguageTag>& languages = {});

/// Throws MalformedTmx with the byte position, or UnsupportedTmx listing
/// inline elements. Ids are assigned afresh in document order.
LinguisticTable import_tmx(std::string_view tmx);

/// Header `id,<lang>...`; LF line endings; fields quoted when needed.
std::string export_csv(const LinguisticTable& table, const std::set<LanguageTag>& languages = {});

/// Reads ids from the first column. When `header` is given the text has no
/// header line and these are the column names. Throws MalformedCsv.
LinguisticTable import_csv(std::string_view csv, const std::optional<std::vector<std::string>>& header = std::nullopt);

/// On-disk table: `manifest.json` plus CSV shards. Throws Io.
void save_table(const LinguisticTable& table, const std::filesystem::path& directory);
LinguisticTable load_table(const std::filesystem::path& directory);

/// Marked text. Line 1 is `#base <uri>`; each segment is written
/// `<<label|text>>` where the label is an optional kind prefix (`p:` or
/// `sub:`, sentences have none) followed by an optional record number `rN`.
/// Segments nest. Literal `<<`, `>>` and `|` are escaped by doubling.
///
/// Throws MixedBases when a record URI has another base,
/// MalformedRecordUri for URIs not of the form `base/rN`, and
/// Unrepresentable when the text cannot be escaped unambiguously.
std::string emit_marked_text(const SegmentedText& doc, std::string_view base);

/// Inverse of emit_marked_text: the source is the unescaped text, spans
/// point into it. Throws MalformedMarkup with the byte position.
SegmentedText parse_marked_text(std::string_view text, const LanguageTag& language = LanguageTag::from_valid_code("un"));

}  // namespace partext
