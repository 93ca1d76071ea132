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
#include <cmath>
#include <limits>
#include <mutex>

#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

// Pads both ends so that every character takes part in three trigrams.
constexpr char32_t kPad = 0x110000;

std::uint64_t pack(char32_t a, char32_t b, char32_t c) {
  return (static_cast<std::uint64_t>(a) << 42) | (static_cast<std::uint64_t>(b) << 21) | c;
}

std::unordered_map<std::uint64_t, std::uint32_t> trigram_counts(std::u32string_view s) {
  std::unordered_map<std::uint64_t, std::uint32_t> out;
  if (s.empty()) return out;
  std::u32string padded;
  padded.reserve(s.size() + 4);
  padded += kPad;
  padded += kPad;
  padded += s;
  padded += kPad;
  padded += kPad;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) ++out[pack(padded[i], padded[i + 1], padded[i + 2])];
  return out;
}

// Largest distance that can still reach `threshold` at length `m`, plus one
// for floating-point slack; the final decision is made on the exact score.
std::size_t distance_budget(double threshold, std::size_t m) {
  return static_cast<std::size_t>(std::floor((1.0 - threshold) * static_cast<double>(m))) + 1;
}

double score_of(std::size_t distance, std::size_t a, std::size_t b) {
  const std::size_t m = std::max(a, b);
  if (m == 0) return 1.0;
  return 1.0 - static_cast<double>(distance) / static_cast<double>(m);
}

}  // namespace

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t bounded_edit_distance(std::u32string_view a, std::u32string_view b, std::size_t bound) {
  const std::size_t n = a.size(), m = b.size();
  if ((n > m ? n - m : m - n) > bound) return bound + 1;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
  std::vector<std::size_t> prev(m + 1, kInf), cur(m + 1, kInf);
  for (std::size_t j = 0; j <= std::min(m, bound); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > bound ? i - bound : 0;
    const std::size_t hi = std::min(m, i + bound);
    std::fill(cur.begin(), cur.end(), kInf);
    if (lo == 0) cur[0] = i;
    std::size_t best = cur[0];
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
      best = std::min(best, cur[j]);
    }
    if (best > bound) return bound + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[m], bound + 1);
}

double similarity(std::string_view a, std::string_view b) {
  const auto x = utf8::to_u32(utf8::normalize_whitespace(a));
  const auto y = utf8::to_u32(utf8::normalize_whitespace(b));
  return score_of(edit_distance(x, y), x.size(), y.size());
}

LinguisticTable::LinguisticTable(std::string name) : name_(std::move(name)) {}

LinguisticTable::LinguisticTable(const LinguisticTable& other) {
  std::shared_lock lock(other.mutex_);
  name_ = other.name_;
  records_ = other.records_;
  indexes_ = other.indexes_;
  dedup_ = other.dedup_;
  version_ = other.version_;
}

LinguisticTable& LinguisticTable::operator=(const LinguisticTable& other) {
  if (this == &other) return *this;
  LinguisticTable copy(other);
  *this = std::move(copy);
  return *this;
}

LinguisticTable::LinguisticTable(LinguisticTable&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  name_ = std::move(other.name_);
  records_ = std::move(other.records_);
  indexes_ = std::move(other.indexes_);
  dedup_ = std::move(other.dedup_);
  version_ = other.version_;
}

LinguisticTable& LinguisticTable::operator=(LinguisticTable&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  name_ = std::move(other.name_);
  records_ = std::move(other.records_);
  indexes_ = std::move(other.indexes_);
  dedup_ = std::move(other.dedup_);
  version_ = other.version_ + 1;
  return *this;
}

std::string LinguisticTable::name() const {
  std::shared_lock lock(mutex_);
  return name_;
}

void LinguisticTable::set_name(std::string name) {
  std::unique_lock lock(mutex_);
  name_ = std::move(name);
  ++version_;
}

void LinguisticTable::check_record(const LinguisticRecord& record) const {
  if (record.segments.empty()) throw Error(ErrorCode::InvalidArgument, "a record needs at least one segment");
  for (const auto& [lang, text] : record.segments) {
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "empty '" + lang.code() + "' segment");
    if (auto bad = utf8::find_invalid(text)) {
      throw Error(ErrorCode::InvalidEncoding, "'" + lang.code() + "' segment is not valid UTF-8", *bad);
    }
  }
}

std::string LinguisticTable::dedup_key(const LinguisticRecord& record) const {
  std::string key;
  for (const auto& [lang, text] : record.segments) {
    key += lang.code();
    key += '\x1F';
    key += utf8::normalize_whitespace(text);
    key += '\x1E';
  }
  return key;
}

void LinguisticTable::index_locked(const LinguisticRecord& record) {
  for (const auto& [lang, text] : record.segments) {
    auto& idx = indexes_[lang];
    const std::string norm = utf8::normalize_whitespace(text);
    idx.exact[norm].insert(record.id);
    auto cps = utf8::to_u32(norm);
    for (const auto& [gram, count] : trigram_counts(cps)) idx.trigrams[gram].push_back({record.id, count});
    idx.by_length[cps.size()].insert(record.id);
    idx.normalized.emplace(record.id, std::move(cps));
  }
}

RecordId LinguisticTable::insert(LinguisticRecord record) {
  check_record(record);
  const std::string key = dedup_key(record);
  std::unique_lock lock(mutex_);
  if (auto it = dedup_.find(key); it != dedup_.end()) return it->second;
  record.id = records_.empty() ? 1 : records_.rbegin()->first + 1;
  index_locked(record);
  dedup_.emplace(key, record.id);
  const RecordId id = record.id;
  records_.emplace(id, std::move(record));
  ++version_;
  return id;
}

void LinguisticTable::insert_with_id(LinguisticRecord record) {
  check_record(record);
  if (record.id == 0) throw Error(ErrorCode::InvalidArgument, "record ids start at 1");
  const std::string key = dedup_key(record);
  std::unique_lock lock(mutex_);
  if (records_.contains(record.id)) {
    throw Error(ErrorCode::InvalidArgument, "duplicate record id " + std::to_string(record.id));
  }
  index_locked(record);
  dedup_.emplace(key, record.id);
  const RecordId id = record.id;
  records_.emplace(id, std::move(record));
  ++version_;
}

std::optional<LinguisticRecord> LinguisticTable::find(RecordId id) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool LinguisticTable::contains(RecordId id) const {
  std::shared_lock lock(mutex_);
  return records_.contains(id);
}

std::size_t LinguisticTable::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<LinguisticRecord> LinguisticTable::records() const {
  std::shared_lock lock(mutex_);
  std::vector<LinguisticRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, r] : records_) out.push_back(r);
  return out;
}

std::set<LanguageTag> LinguisticTable::languages() const {
  std::shared_lock lock(mutex_);
  std::set<LanguageTag> out;
  for (const auto& [lang, idx] : indexes_) {
    if (!idx.normalized.empty()) out.insert(lang);
  }
  return out;
}

std::uint64_t LinguisticTable::version() const {
  std::shared_lock lock(mutex_);
  return version_;
}

void LinguisticTable::sort_by_value_locked(std::vector<RecordId>& ids) const {
  std::sort(ids.begin(), ids.end(), [&](RecordId a, RecordId b) {
    const double va = records_.at(a).value.effective();
    const double vb = records_.at(b).value.effective();
    if (va != vb) return va > vb;
    return a < b;
  });
}

std::vector<LinguisticRecord> LinguisticTable::lookup_exact(const LanguageTag& language, std::string_view text) const {
  std::shared_lock lock(mutex_);
  std::vector<LinguisticRecord> out;
  auto idx = indexes_.find(language);
  if (idx == indexes_.end()) return out;
  auto hit = idx->second.exact.find(utf8::normalize_whitespace(text));
  if (hit == idx->second.exact.end()) return out;
  std::vector<RecordId> ids(hit->second.begin(), hit->second.end());
  sort_by_value_locked(ids);
  for (auto id : ids) out.push_back(records_.at(id));
  return out;
}

std::vector<ScoredMatch> LinguisticTable::lookup_fuzzy(const LanguageTag& language, std::string_view text,
                                                       double threshold) const {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fuzzy threshold must lie in (0, 1]");
  }
  const auto query = utf8::to_u32(utf8::normalize_whitespace(text));
  const std::size_t lq = query.size();

  std::shared_lock lock(mutex_);
  std::vector<ScoredMatch> out;
  auto found = indexes_.find(language);
  if (found == indexes_.end()) return out;
  const LanguageIndex& idx = found->second;

  std::unordered_map<RecordId, std::uint32_t> shared;
  for (const auto& [gram, qcount] : trigram_counts(query)) {
    auto postings = idx.trigrams.find(gram);
    if (postings == idx.trigrams.end()) continue;
    for (const auto& p : postings->second) shared[p.id] += std::min(qcount, p.count);
  }

  const auto min_len = static_cast<std::size_t>(std::max(0.0, std::floor(threshold * static_cast<double>(lq)) - 1.0));
  const auto max_len = static_cast<std::size_t>(std::ceil(static_cast<double>(lq) / threshold)) + 1;
  for (auto bucket = idx.by_length.lower_bound(min_len); bucket != idx.by_length.end() && bucket->first <= max_len;
       ++bucket) {
    const std::size_t ls = bucket->first;
    const std::size_t m = std::max(lq, ls);
    const std::size_t budget = distance_budget(threshold, m);
    if ((lq > ls ? lq - ls : ls - lq) > budget) continue;
    const long long required = static_cast<long long>(m) + 2 - 3 * static_cast<long long>(budget);
    for (RecordId id : bucket->second) {
      if (lq > 0 && ls > 0 && required > 0) {
        auto s = shared.find(id);
        if (s == shared.end() || static_cast<long long>(s->second) < required) continue;
      }
      const std::size_t d = bounded_edit_distance(query, idx.normalized.at(id), budget);
      if (d > budget) continue;
      const double score = score_of(d, lq, ls);
      if (score >= threshold) out.push_back({id, score});
    }
  }

  std::sort(out.begin(), out.end(), [&](const ScoredMatch& a, const ScoredMatch& b) {
    if (a.score != b.score) return a.score > b.score;
    const double va = records_.at(a.id).value.effective();
    const double vb = records_.at(b.id).value.effective();
    if (va != vb) return va > vb;
    return a.id < b.id;
  });
  return out;
}

RecordValue LinguisticTable::bump_value(RecordId id, ValueEvent event) {
  std::unique_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorCode::NoSuchRecord, "no record " + std::to_string(id));
  if (event == ValueEvent::read) {
    ++it->second.value.reads;
  } else {
    ++it->second.value.uses;
  }
  ++version_;
  return it->second.value;
}

RecordValue LinguisticTable::set_manual_value(RecordId id, std::optional<double> value) {
  if (value && !(*value >= 0.0)) throw Error(ErrorCode::InvalidArgument, "record value must be non-negative");
  std::unique_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) throw Error(ErrorCode::NoSuchRecord, "no record " + std::to_string(id));
  it->second.value.manual_override = value;
  ++version_;
  return it->second.value;
}

bool operator==(const LinguisticTable& a, const LinguisticTable& b) {
  if (&a == &b) return true;
  std::shared_lock la(a.mutex_, std::defer_lock);
  std::shared_lock lb(b.mutex_, std::defer_lock);
  std::lock(la, lb);
  return a.name_ == b.name_ && a.records_ == b.records_;
}

}  // namespace partext
