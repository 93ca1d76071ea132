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

#include "partext/tmserver.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <json.hpp>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "partext/error.hpp"
#include "partext/medbox.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kTmx = "application/x-tmx+xml";
constexpr const char* kCsv = "text/csv; charset=utf-8";
constexpr const char* kZip = "application/zip";

struct HttpError {
  int status;
  std::string code;
  std::string message;
  json extra = json::object();
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw HttpError{status, std::move(code), std::move(message)};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoSuchRecord:
    case ErrorCode::UnknownBase:
      return 404;
    case ErrorCode::Io:
      return 500;
    default:
      return 400;
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view data) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  const auto tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
  }
  fs::rename(tmp, p, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp + ": " + ec.message());
}

bool valid_name(std::string_view name) {
  if (name.empty() || name.size() > 128 || name.front() == '.') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' || c == '_' ||
           c == '-';
  });
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

LanguageTag language_param(const httplib::Request& req, const std::string& key) {
  if (!req.has_param(key)) fail(400, "InvalidArgument", "missing parameter '" + key + "'");
  auto tag = try_parse_tag(req.get_param_value(key));
  if (!tag) fail(400, "InvalidLanguage", "'" + req.get_param_value(key) + "' is not a language code");
  return *tag;
}

std::vector<LanguageTag> language_list(const std::string& raw) {
  std::vector<LanguageTag> out;
  std::string_view rest = raw;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = utf8::normalize_whitespace(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    auto tag = try_parse_tag(item);
    if (!tag) fail(400, "InvalidLanguage", "'" + item + "' is not a language code");
    out.push_back(*tag);
  }
  return out;
}

double threshold_param(const httplib::Request& req, double fallback) {
  if (!req.has_param("threshold")) return fallback;
  const auto raw = req.get_param_value("threshold");
  double value = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc() || ptr != raw.data() + raw.size() || !(value > 0.0 && value <= 1.0)) {
    fail(400, "InvalidArgument", "threshold must be a number in (0, 1]");
  }
  return value;
}

std::string format_param(const httplib::Request& req) {
  const auto format = req.has_param("format") ? req.get_param_value("format") : std::string("tmx");
  if (format != "tmx" && format != "csv") fail(400, "InvalidArgument", "format must be tmx or csv");
  return format;
}

json record_json(const LinguisticRecord& r, const std::string& table) {
  json segments = json::object();
  for (const auto& [lang, text] : r.segments) segments[lang.code()] = text;
  json value{{"reads", r.value.reads}, {"uses", r.value.uses}, {"effective", r.value.effective()}};
  if (r.value.manual_override) value["manual"] = *r.value.manual_override;
  json out{{"id", r.id}, {"uri", record_uri(table, r.id)}, {"segments", std::move(segments)}, {"value", value}};
  if (r.domain) out["domain"] = *r.domain;
  if (r.source_link) out["source_link"] = *r.source_link;
  if (r.provenance) out["provenance"] = {{"table", r.provenance->table}, {"id", r.provenance->id}};
  return out;
}

struct Submission {
  std::string id;
  std::string table;
  LanguageTag language = LanguageTag::from_valid_code("un");
  double threshold = 1.0;
  std::string created;
  std::optional<SegmentedText> doc;
  std::vector<std::vector<RecordId>> matches;

  json to_json() const {
    return json{{"id", id},           {"table", table},     {"language", language.code()},
                {"threshold", threshold}, {"created", created}, {"segmentation", json::parse(serialize_segmentation(*doc))},
                {"matches", matches}};
  }
  static Submission from_json(const json& j) {
    Submission s;
    s.id = j.at("id").get<std::string>();
    s.table = j.at("table").get<std::string>();
    s.language = parse_tag(j.at("language").get<std::string>());
    s.threshold = j.at("threshold").get<double>();
    s.created = j.at("created").get<std::string>();
    s.doc = deserialize_segmentation(j.at("segmentation").dump());
    s.matches = j.at("matches").get<std::vector<std::vector<RecordId>>>();
    return s;
  }
};

enum class SegmentState { untouched, draft, confirmed };

std::string_view to_string(SegmentState s) {
  switch (s) {
    case SegmentState::untouched: return "untouched";
    case SegmentState::draft: return "draft";
    case SegmentState::confirmed: return "confirmed";
  }
  return "untouched";
}

SegmentState parse_state(std::string_view s) {
  if (s == "draft") return SegmentState::draft;
  if (s == "confirmed") return SegmentState::confirmed;
  if (s == "untouched") return SegmentState::untouched;
  throw Error(ErrorCode::InvalidArgument, "unknown segment state '" + std::string(s) + "'");
}

struct SessionSegment {
  SegmentPath path;
  std::string source;
  std::string text;
  SegmentState state = SegmentState::untouched;
};

struct Session {
  std::string id;
  std::string table;
  std::string dossier_id;
  LanguageTag source = LanguageTag::from_valid_code("un");
  LanguageTag target = LanguageTag::from_valid_code("un");
  std::string created;
  std::uint64_t sequence = 0;
  std::vector<SessionSegment> segments;
  bool completed = false;
  std::size_t harvested = 0;
  std::mutex mutex;

  std::size_t confirmed() const {
    return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(), [](const auto& s) {
      return s.state == SegmentState::confirmed;
    }));
  }

  json summary() const {
    return json{{"id", id},
                {"uri", "/sessions/" + id},
                {"dossier", dossier_id},
                {"table", table},
                {"source", source.code()},
                {"target", target.code()},
                {"created", created},
                {"segments", segments.size()},
                {"confirmed", confirmed()},
                {"completed", completed}};
  }

  json to_json() const {
    json segs = json::array();
    for (const auto& s : segments) {
      segs.push_back({{"path", s.path}, {"source", s.source}, {"text", s.text}, {"state", to_string(s.state)}});
    }
    auto out = summary();
    out["sequence"] = sequence;
    out["harvested"] = harvested;
    out["segments"] = std::move(segs);
    return out;
  }

  void load(const json& j) {
    id = j.at("id").get<std::string>();
    table = j.at("table").get<std::string>();
    dossier_id = j.at("dossier").get<std::string>();
    source = parse_tag(j.at("source").get<std::string>());
    target = parse_tag(j.at("target").get<std::string>());
    created = j.at("created").get<std::string>();
    sequence = j.at("sequence").get<std::uint64_t>();
    completed = j.at("completed").get<bool>();
    harvested = j.at("harvested").get<std::size_t>();
    for (const auto& s : j.at("segments")) {
      segments.push_back({s.at("path").get<SegmentPath>(), s.at("source").get<std::string>(),
                          s.at("text").get<std::string>(), parse_state(s.at("state").get<std::string>())});
    }
  }
};

/// Rebuilds the source tree with each translated leaf replaced by its
/// target text. Gaps between segments are copied without their non-content
/// ranges; a dropped range between two siblings leaves a single space.
class TargetBuilder {
 public:
  TargetBuilder(const SegmentedText& source, const std::map<SegmentPath, std::string>& texts)
      : src_(source), texts_(texts) {}

  SegmentedText build(const LanguageTag& language) {
    SegmentPath path;
    Segment root = visit(src_.root(), path);
    return SegmentedText(language, std::move(out_), std::move(root));
  }

 private:
  Segment visit(const Segment& s, SegmentPath& path) {
    Segment t;
    t.kind = s.kind;
    t.origin = s.origin;
    t.span.begin = out_.size();
    if (s.children.empty()) {
      auto it = texts_.find(path);
      out_ += it != texts_.end() ? it->second : segment_content(src_, s);
    } else {
      std::size_t cursor = s.span.begin;
      for (std::size_t k = 0; k < s.children.size(); ++k) {
        const auto& child = s.children[k];
        gap(cursor, child.span.begin, k > 0);
        path.push_back(k);
        t.children.push_back(visit(child, path));
        path.pop_back();
        cursor = child.span.end;
      }
      gap(cursor, s.span.end, false);
    }
    t.span.end = out_.size();
    return t;
  }

  void gap(std::size_t begin, std::size_t end, bool between) {
    const auto& text = src_.source();
    bool dropped = false;
    std::size_t i = begin;
    for (const auto& skip : src_.non_content()) {
      if (skip.end <= i) continue;
      if (skip.begin >= end) break;
      if (skip.begin > i) out_.append(text, i, skip.begin - i);
      dropped = true;
      i = std::min(skip.end, end);
    }
    if (i < end) out_.append(text, i, end - i);
    if (dropped && between && (out_.empty() || out_.back() != ' ')) out_ += ' ';
  }

  const SegmentedText& src_;
  const std::map<SegmentPath, std::string>& texts_;
  std::string out_;
};

}  // namespace

struct TmServer::Impl {
  explicit Impl(ServerOptions o) : options(std::move(o)), rng(std::random_device{}()) {}

  ServerOptions options;
  httplib::Server http;
  std::thread worker;
  int port = -1;

  mutable std::shared_mutex state_mutex;
  TableRegistry tables;
  std::map<std::string, std::shared_ptr<Submission>> documents;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::uint64_t next_sequence = 1;
  std::mutex rng_mutex;
  std::mt19937_64 rng;

  std::mutex save_mutex;

  struct CacheEntry {
    std::uint64_t version;
    std::string body;
  };
  std::mutex cache_mutex;
  std::map<std::string, CacheEntry> cache;

  fs::path tables_dir() const { return options.data_dir / "tables"; }
  fs::path documents_dir() const { return options.data_dir / "documents"; }
  fs::path sessions_dir() const { return options.data_dir / "sessions"; }

  std::string fresh_id(char prefix) {
    std::lock_guard lock(rng_mutex);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id(1, prefix);
    auto v = rng();
    for (int k = 0; k < 16; ++k, v >>= 4) id += kHex[v & 15];
    return id;
  }

  // --- state ---------------------------------------------------------------

  void load() {
    std::error_code ec;
    fs::create_directories(options.data_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + options.data_dir.string());
    if (fs::is_directory(tables_dir())) {
      for (const auto& entry : fs::directory_iterator(tables_dir())) {
        if (!entry.is_directory() || !valid_name(entry.path().filename().string())) continue;
        auto t = std::make_shared<LinguisticTable>(load_table(entry.path()));
        t->set_name(entry.path().filename().string());
        tables[t->name()] = std::move(t);
      }
    }
    if (!tables.contains(options.database)) {
      auto t = std::make_shared<LinguisticTable>(options.database);
      save_table(*t, tables_dir() / options.database);
      tables[options.database] = std::move(t);
    }
    if (fs::is_directory(documents_dir())) {
      for (const auto& entry : fs::directory_iterator(documents_dir())) {
        if (entry.path().extension() != ".json") continue;
        try {
          auto s = std::make_shared<Submission>(Submission::from_json(json::parse(read_file(entry.path()))));
          documents[s->id] = std::move(s);
        } catch (const std::exception& e) {
          throw Error(ErrorCode::Io, "corrupt submission " + entry.path().string() + ": " + e.what());
        }
      }
    }
    if (fs::is_directory(sessions_dir())) {
      for (const auto& entry : fs::directory_iterator(sessions_dir())) {
        if (entry.path().extension() != ".json") continue;
        try {
          auto s = std::make_shared<Session>();
          s->load(json::parse(read_file(entry.path())));
          next_sequence = std::max(next_sequence, s->sequence + 1);
          sessions[s->id] = std::move(s);
        } catch (const std::exception& e) {
          throw Error(ErrorCode::Io, "corrupt session " + entry.path().string() + ": " + e.what());
        }
      }
    }
  }

  std::shared_ptr<LinguisticTable> find_table(const std::string& name) const {
    std::shared_lock lock(state_mutex);
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : it->second;
  }

  std::shared_ptr<LinguisticTable> require_table(const std::string& name) const {
    auto t = find_table(name);
    if (!t) fail(404, "UnknownTable", "no table named '" + name + "'");
    return t;
  }

  std::string table_param(const httplib::Request& req) const {
    auto name = req.has_param("table") ? req.get_param_value("table") : options.database;
    if (!valid_name(name)) fail(400, "InvalidArgument", "bad table name '" + name + "'");
    return name;
  }

  void persist_table(const LinguisticTable& table) {
    std::lock_guard lock(save_mutex);
    save_table(table, tables_dir() / table.name());
  }

  void put_table(LinguisticTable table) {
    if (!valid_name(table.name())) throw Error(ErrorCode::InvalidArgument, "bad table name '" + table.name() + "'");
    auto t = std::make_shared<LinguisticTable>(std::move(table));
    persist_table(*t);
    std::unique_lock lock(state_mutex);
    tables[t->name()] = std::move(t);
  }

  void persist_session(const Session& s) { write_file(sessions_dir() / (s.id + ".json"), s.to_json().dump(1)); }

  std::shared_ptr<Submission> require_document(const std::string& id) const {
    std::shared_lock lock(state_mutex);
    auto it = documents.find(id);
    if (it == documents.end()) fail(404, "UnknownDocument", "no submission '" + id + "'");
    return it->second;
  }

  std::shared_ptr<Session> require_session(const std::string& id) const {
    std::shared_lock lock(state_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) fail(404, "UnknownSession", "no session '" + id + "'");
    return it->second;
  }

  // --- documents -----------------------------------------------------------

  json matches_json(const Submission& s) const {
    json segs = json::array();
    const auto leaves = leaf_segments(*s.doc);
    for (std::size_t k = 0; k < s.matches.size(); ++k) {
      segs.push_back({{"index", k},
                      {"text", utf8::normalize_whitespace(segment_content(*s.doc, segment_at(*s.doc, leaves[k])))},
                      {"records", s.matches[k]}});
    }
    return json{{"id", s.id},           {"uri", "/documents/" + s.id}, {"table", s.table},
                {"language", s.language.code()}, {"threshold", s.threshold},    {"created", s.created},
                {"segments", std::move(segs)}};
  }

  void post_document(const httplib::Request& req, httplib::Response& res) {
    const auto lang = language_param(req, "lang");
    const double threshold = threshold_param(req, 1.0);
    const auto table_name = table_param(req);
    auto db = require_table(table_name);
    if (!utf8::is_valid(req.body)) fail(422, "InvalidEncoding", "document is not UTF-8");
    if (utf8::normalize_whitespace(req.body).empty()) fail(400, "InvalidArgument", "empty document");
    std::string markup = req.has_param("markup") ? req.get_param_value("markup")
                                                 : (req.body.starts_with("#base ") ? "marked" : "plain");
    if (markup != "plain" && markup != "marked") fail(400, "InvalidArgument", "markup must be plain or marked");

    auto s = std::make_shared<Submission>();
    try {
      s->doc = markup == "marked" ? parse_marked_text(req.body, lang) : segment_text(req.body, lang);
    } catch (const Error& e) {
      fail(422, std::string(to_string(e.code())), e.what());
    }
    s->id = fresh_id('d');
    s->table = table_name;
    s->language = lang;
    s->threshold = threshold;
    s->created = now_iso();
    s->matches = match_segments(*db, *s->doc, threshold);
    write_file(documents_dir() / (s->id + ".json"), s->to_json().dump(1));
    {
      std::unique_lock lock(state_mutex);
      documents[s->id] = s;
    }
    res.status = 201;
    res.set_header("Location", "/documents/" + s->id);
    res.set_content(matches_json(*s).dump(1), kJson);
  }

  void get_document(const httplib::Request& req, httplib::Response& res) {
    auto s = require_document(req.matches[1]);
    auto db = require_table(s->table);
    const auto format = format_param(req);
    const auto available = db->languages();
    std::set<LanguageTag> targets;
    if (req.has_param("langs")) {
      for (const auto& l : language_list(req.get_param_value("langs"))) {
        if (!available.contains(l)) fail(400, "UnknownLanguage", "table has no '" + l.code() + "' segments");
        if (l != s->language) targets.insert(l);
      }
    } else {
      targets = available;
      targets.erase(s->language);
    }
    std::string key = s->id + "|" + format + "|";
    for (const auto& t : targets) key += t.code() + ",";
    const auto version = db->version();
    {
      std::lock_guard lock(cache_mutex);
      auto it = cache.find(key);
      if (it != cache.end() && it->second.version == version) {
        res.set_content(it->second.body, format == "tmx" ? kTmx : kCsv);
        return;
      }
    }
    auto tm = build_tm(*db, s->matches, s->language, targets);
    auto languages = targets;
    languages.insert(s->language);
    auto body = format == "tmx" ? export_tmx(tm, languages) : export_csv(tm, languages);
    {
      std::lock_guard lock(cache_mutex);
      cache[key] = {version, body};
    }
    res.set_content(std::move(body), format == "tmx" ? kTmx : kCsv);
  }

  // --- tables --------------------------------------------------------------

  json table_summary(const LinguisticTable& t) const {
    json langs = json::array();
    for (const auto& l : t.languages()) langs.push_back(l.code());
    return json{{"name", t.name()}, {"uri", "/tables/" + t.name()}, {"records", t.size()}, {"languages", langs}};
  }

  void list_tables(httplib::Response& res) const {
    json out = json::array();
    std::shared_lock lock(state_mutex);
    for (const auto& [name, t] : tables) out.push_back(table_summary(*t));
    res.set_content(out.dump(1), kJson);
  }

  void get_table(const httplib::Request& req, httplib::Response& res) {
    auto t = require_table(req.matches[1]);
    const auto format = format_param(req);
    std::set<LanguageTag> langs;
    if (req.has_param("langs")) {
      const auto list = language_list(req.get_param_value("langs"));
      langs.insert(list.begin(), list.end());
    }
    res.set_content(format == "tmx" ? export_tmx(*t, langs) : export_csv(*t, langs), format == "tmx" ? kTmx : kCsv);
  }

  void put_table_http(const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[1];
    if (!valid_name(name)) fail(400, "InvalidArgument", "bad table name '" + name + "'");
    const auto format = format_param(req);
    auto table = format == "tmx" ? import_tmx(req.body) : import_csv(req.body);
    table.set_name(name);
    const bool existed = find_table(name) != nullptr;
    put_table(std::move(table));
    res.status = existed ? 200 : 201;
    res.set_header("Location", "/tables/" + name);
    res.set_content(table_summary(*require_table(name)).dump(1), kJson);
  }

  void get_record(const httplib::Request& req, httplib::Response& res) {
    const std::string name = req.matches[1];
    const std::string rn = req.matches[2];
    TableRegistry view;
    if (auto t = find_table(name)) view[name] = t;
    const auto record = resolve_record_uri(name + "/" + rn, view);
    res.set_content(record_json(record, name).dump(1), kJson);
  }

  // --- sessions ------------------------------------------------------------

  json suggestions(const LinguisticTable& db, const Session& s, const SessionSegment& seg) const {
    json out = json::array();
    if (utf8::normalize_whitespace(seg.source).empty()) return out;
    for (const auto& m : db.lookup_fuzzy(s.source, seg.source, options.suggestion_threshold)) {
      auto r = db.find(m.id);
      if (!r || !r->segments.contains(s.target)) continue;
      out.push_back({{"id", m.id}, {"uri", record_uri(s.table, m.id)}, {"score", m.score},
                     {"text", r->segments.at(s.target)}});
      if (out.size() == 10) break;
    }
    return out;
  }

  json segment_json(const Session& s, std::size_t n, const LinguisticTable* db) const {
    const auto& seg = s.segments[n];
    json out{{"index", n},
             {"path", seg.path},
             {"source", seg.source},
             {"text", seg.text},
             {"state", to_string(seg.state)}};
    if (db) out["suggestions"] = suggestions(*db, s, seg);
    return out;
  }

  void post_session(const httplib::Request& req, httplib::Response& res) {
    const auto target = language_param(req, "target");
    const auto table_name = table_param(req);
    require_table(table_name);
    auto diagnostics = validate(req.body);
    if (std::any_of(diagnostics.begin(), diagnostics.end(), [](const auto& d) { return d.severity == Severity::error; })) {
      HttpError e{400, "InvalidDossier", "the dossier does not validate"};
      e.extra["diagnostics"] = json::array();
      for (const auto& d : diagnostics) {
        e.extra["diagnostics"].push_back(
            {{"severity", to_string(d.severity)}, {"code", d.code}, {"member", d.member}, {"message", d.message}});
      }
      throw e;
    }
    const auto med = unpack(req.body);
    const auto declared = med.declared_languages();
    if (std::find(declared.begin(), declared.end(), target) == declared.end()) {
      fail(400, "UndeclaredLanguage", "target '" + target.code() + "' is not declared by the dossier");
    }
    std::optional<LanguageTag> source;
    if (req.has_param("source")) {
      source = language_param(req, "source");
    } else {
      for (const auto& [lang, v] : med.parallel.versions) {
        if (lang == target) continue;
        if (source) fail(400, "InvalidArgument", "the dossier has several versions; pass 'source'");
        source = lang;
      }
      if (!source) fail(400, "InvalidArgument", "the dossier has no version to translate from");
    }
    if (*source == target) fail(400, "InvalidArgument", "source and target are the same language");
    auto v = med.parallel.versions.find(*source);
    if (v == med.parallel.versions.end()) {
      fail(400, "MissingVersion", "the dossier has no embedded '" + source->code() + "' version");
    }

    auto s = std::make_shared<Session>();
    s->id = fresh_id('s');
    s->table = table_name;
    s->dossier_id = med.header.at("id");
    s->source = *source;
    s->target = target;
    s->created = now_iso();
    for (const auto& path : leaf_segments(v->second)) {
      auto text = utf8::normalize_whitespace(segment_content(v->second, segment_at(v->second, path)));
      if (text.empty()) continue;
      s->segments.push_back({path, std::move(text), "", SegmentState::untouched});
    }
    write_file(sessions_dir() / (s->id + ".med"), req.body);
    {
      std::unique_lock lock(state_mutex);
      s->sequence = next_sequence++;
      sessions[s->id] = s;
    }
    persist_session(*s);
    res.status = 201;
    res.set_header("Location", "/sessions/" + s->id);
    res.set_content(s->summary().dump(1), kJson);
  }

  void list_sessions(const httplib::Request& req, httplib::Response& res) const {
    const bool active_only = req.has_param("active") && req.get_param_value("active") == "true";
    std::vector<std::shared_ptr<Session>> all;
    {
      std::shared_lock lock(state_mutex);
      for (const auto& [id, s] : sessions) all.push_back(s);
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a->sequence < b->sequence; });
    json out = json::array();
    for (const auto& s : all) {
      std::lock_guard lock(s->mutex);
      if (active_only && s->completed) continue;
      out.push_back(s->summary());
    }
    res.set_content(out.dump(1), kJson);
  }

  void get_session(const httplib::Request& req, httplib::Response& res) const {
    auto s = require_session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    res.set_content(s->summary().dump(1), kJson);
  }

  void get_segments(const httplib::Request& req, httplib::Response& res) const {
    auto s = require_session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    auto db = find_table(s->table);
    json segs = json::array();
    for (std::size_t n = 0; n < s->segments.size(); ++n) segs.push_back(segment_json(*s, n, db.get()));
    auto out = s->summary();
    out["segments"] = std::move(segs);
    res.set_content(out.dump(1), kJson);
  }

  std::size_t segment_index(const Session& s, const std::string& raw) const {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), n);
    if (ec != std::errc() || ptr != raw.data() + raw.size() || n >= s.segments.size()) {
      fail(404, "UnknownSegment", "session has no segment '" + raw + "'");
    }
    return n;
  }

  void get_segment(const httplib::Request& req, httplib::Response& res) const {
    auto s = require_session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    const auto n = segment_index(*s, req.matches[2]);
    auto db = find_table(s->table);
    res.set_content(segment_json(*s, n, db.get()).dump(1), kJson);
  }

  void put_segment(const httplib::Request& req, httplib::Response& res) {
    auto s = require_session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    const auto n = segment_index(*s, req.matches[2]);
    if (s->completed) fail(409, "SessionCompleted", "session " + s->id + " is completed");
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      fail(400, "InvalidArgument", "body must be a JSON object");
    }
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      fail(400, "InvalidArgument", "body needs a string 'text'");
    }
    auto text = body["text"].get<std::string>();
    if (!utf8::is_valid(text)) fail(400, "InvalidEncoding", "text is not UTF-8");
    auto state = SegmentState::draft;
    if (body.contains("state")) {
      if (!body["state"].is_string()) fail(400, "InvalidArgument", "'state' must be a string");
      const auto raw = body["state"].get<std::string>();
      if (raw != "draft" && raw != "confirmed") fail(400, "InvalidArgument", "'state' must be draft or confirmed");
      state = parse_state(raw);
    }
    std::optional<RecordId> accepted;
    if (body.contains("accepted") && !body["accepted"].is_null()) {
      if (!body["accepted"].is_number_unsigned()) fail(400, "InvalidArgument", "'accepted' must be a record id");
      accepted = body["accepted"].get<RecordId>();
    }
    auto db = require_table(s->table);
    if (accepted) {
      if (!db->contains(*accepted)) fail(400, "NoSuchRecord", "no record r" + std::to_string(*accepted));
      db->bump_value(*accepted, ValueEvent::use);
      persist_table(*db);
    }
    auto& seg = s->segments[n];
    seg.text = std::move(text);
    seg.state = state;
    persist_session(*s);
    res.set_content(segment_json(*s, n, nullptr).dump(1), kJson);
  }

  void get_peer(const httplib::Request& req, httplib::Response& res) const {
    auto self = require_session(req.matches[1]);
    auto lang = try_parse_tag(std::string(req.matches[2]));
    if (!lang) fail(400, "InvalidLanguage", "'" + std::string(req.matches[2]) + "' is not a language code");
    std::string dossier;
    {
      std::lock_guard lock(self->mutex);
      dossier = self->dossier_id;
    }
    std::shared_ptr<Session> peer;
    bool peer_active = false;
    std::vector<std::shared_ptr<Session>> all;
    {
      std::shared_lock lock(state_mutex);
      for (const auto& [id, s] : sessions) all.push_back(s);
    }
    {
      for (const auto& s : all) {
        if (s == self) continue;
        std::lock_guard slock(s->mutex);
        if (s->dossier_id != dossier || s->target != *lang) continue;
        const bool active = !s->completed;
        if (!peer || (active && !peer_active) || (active == peer_active && s->sequence > peer->sequence)) {
          peer = s;
          peer_active = active;
        }
      }
    }
    json out{{"language", lang->code()}, {"session", nullptr}, {"segments", json::array()}};
    if (peer) {
      std::lock_guard lock(peer->mutex);
      out["session"] = peer->id;
      out["completed"] = peer->completed;
      for (std::size_t n = 0; n < peer->segments.size(); ++n) {
        const auto& seg = peer->segments[n];
        if (seg.state != SegmentState::confirmed) continue;
        out["segments"].push_back({{"index", n}, {"source", seg.source}, {"text", seg.text}});
      }
    }
    res.set_content(out.dump(1), kJson);
  }

  std::string complete_locked(Session& s) {
    auto med = unpack(read_file(sessions_dir() / (s.id + ".med")));
    const auto& source = med.parallel.versions.at(s.source);

    std::map<SegmentPath, std::string> texts;
    bool all_confirmed = true;
    for (const auto& seg : s.segments) {
      texts[seg.path] = seg.text;
      all_confirmed = all_confirmed && seg.state == SegmentState::confirmed;
    }
    auto target = TargetBuilder(source, texts).build(s.target);

    auto& pt = med.parallel;
    for (auto& g : pt.groups) g.members.erase(s.target);
    pt.versions.insert_or_assign(s.target, std::move(target));
    bool linked = false;
    for (auto& g : pt.groups) {
      auto it = g.members.find(s.source);
      if (it == g.members.end()) continue;
      g.members[s.target] = it->second;
      linked = true;
    }
    if (!linked) {
      for (const auto& seg : s.segments) {
        AlignmentGroup g;
        g.kind = segment_at(source, seg.path).kind;
        g.members = {{s.source, seg.path}, {s.target, seg.path}};
        pt.groups.push_back(std::move(g));
      }
    }
    pt.granularity = parallel_granularity(pt.versions);
    med.parallel = set_entirety(pt, s.target, all_confirmed ? EntiretySet{Entirety::complete}
                                                            : EntiretySet{Entirety::translating});
    med.external_versions.erase(s.target);
    if (med.header.contains("statistics.versions")) update_statistics(med);

    auto db = require_table(s.table);
    const auto before = db->size();
    for (std::size_t n = 0; n < s.segments.size(); ++n) {
      const auto& seg = s.segments[n];
      if (seg.state != SegmentState::confirmed || utf8::normalize_whitespace(seg.text).empty()) continue;
      LinguisticRecord r;
      r.segments[s.source] = seg.source;
      r.segments[s.target] = seg.text;
      r.source_link = "/sessions/" + s.id + "/segments/" + std::to_string(n);
      db->insert(std::move(r));
    }
    s.harvested = db->size() - before;
    persist_table(*db);
    return pack(med);
  }

  void complete(const httplib::Request& req, httplib::Response& res) {
    auto s = require_session(req.matches[1]);
    std::lock_guard lock(s->mutex);
    const auto result_path = sessions_dir() / (s->id + ".result.med");
    if (!s->completed) {
      auto bytes = complete_locked(*s);
      write_file(result_path, bytes);
      s->completed = true;
      persist_session(*s);
    }
    res.set_header("X-Partext-Harvested", std::to_string(s->harvested));
    res.set_header("Content-Disposition", "attachment; filename=\"" + s->dossier_id + ".med\"");
    res.set_content(read_file(result_path), kZip);
  }

  // --- wiring --------------------------------------------------------------

  template <typename F>
  httplib::Server::Handler guard(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      auto error = [&res](int status, const std::string& code, const std::string& message, json extra = json::object()) {
        res.status = status;
        extra["error"] = code;
        extra["message"] = message;
        res.set_content(extra.dump(1), kJson);
      };
      try {
        f(req, res);
      } catch (const HttpError& e) {
        error(e.status, e.code, e.message, e.extra);
      } catch (const Error& e) {
        error(status_for(e.code()), std::string(to_string(e.code())), e.what());
      } catch (const std::exception& e) {
        error(500, "Internal", e.what());
      }
    };
  }

  void routes() {
    const auto threads = std::max<std::size_t>(1, options.threads);
    http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    http.Post("/documents", guard([this](const auto& q, auto& r) { post_document(q, r); }));
    http.Get(R"(/documents/([^/]+)/matches)", guard([this](const auto& q, auto& r) {
               r.set_content(matches_json(*require_document(q.matches[1])).dump(1), kJson);
             }));
    http.Get(R"(/documents/([^/]+))", guard([this](const auto& q, auto& r) { get_document(q, r); }));
    http.Get("/tables", guard([this](const auto&, auto& r) { list_tables(r); }));
    http.Get(R"(/tables/([^/]+)/records/([^/]+))", guard([this](const auto& q, auto& r) { get_record(q, r); }));
    http.Get(R"(/tables/([^/]+))", guard([this](const auto& q, auto& r) { get_table(q, r); }));
    http.Put(R"(/tables/([^/]+))", guard([this](const auto& q, auto& r) { put_table_http(q, r); }));
    http.Post("/sessions", guard([this](const auto& q, auto& r) { post_session(q, r); }));
    http.Get("/sessions", guard([this](const auto& q, auto& r) { list_sessions(q, r); }));
    http.Get(R"(/sessions/([^/]+))", guard([this](const auto& q, auto& r) { get_session(q, r); }));
    http.Get(R"(/sessions/([^/]+)/segments)", guard([this](const auto& q, auto& r) { get_segments(q, r); }));
    http.Get(R"(/sessions/([^/]+)/segments/([^/]+))", guard([this](const auto& q, auto& r) { get_segment(q, r); }));
    http.Put(R"(/sessions/([^/]+)/segments/([^/]+))", guard([this](const auto& q, auto& r) { put_segment(q, r); }));
    http.Get(R"(/sessions/([^/]+)/peer/([^/]+))", guard([this](const auto& q, auto& r) { get_peer(q, r); }));
    http.Post(R"(/sessions/([^/]+)/complete)", guard([this](const auto& q, auto& r) { complete(q, r); }));
  }
};

TmServer::TmServer(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  if (!valid_name(impl_->options.database)) {
    throw Error(ErrorCode::InvalidArgument, "bad database name '" + impl_->options.database + "'");
  }
  impl_->load();
  impl_->routes();
}

TmServer::~TmServer() { stop(); }

int TmServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else if (impl_->http.bind_to_port(host, port)) {
    impl_->port = port;
  } else {
    impl_->port = -1;
  }
  if (impl_->port < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  return impl_->port;
}

void TmServer::listen() { impl_->http.listen_after_bind(); }

int TmServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  impl_->worker = std::thread([this] { listen(); });
  impl_->http.wait_until_ready();
  return bound;
}

void TmServer::stop() {
  impl_->http.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

std::shared_ptr<LinguisticTable> TmServer::table(const std::string& name) const { return impl_->find_table(name); }

std::shared_ptr<LinguisticTable> TmServer::database() const { return impl_->find_table(impl_->options.database); }

void TmServer::put_table(LinguisticTable table) { impl_->put_table(std::move(table)); }

}  // namespace partext
