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

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "medbox_internal.hpp"
#include "partext/error.hpp"
#include "partext/medbox.hpp"
#include "partext/utf8.hpp"

namespace partext {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidDossier, what); }

std::vector<Artefact> sorted(std::vector<Artefact> v) {
  std::sort(v.begin(), v.end(), [](const Artefact& a, const Artefact& b) {
    return std::tie(a.role, a.name, a.uri, a.content) < std::tie(b.role, b.name, b.uri, b.content);
  });
  return v;
}

std::vector<SourceFile> sorted(std::vector<SourceFile> v) {
  std::sort(v.begin(), v.end(), [](const SourceFile& a, const SourceFile& b) { return a.name < b.name; });
  return v;
}

json group_to_json(const AlignmentGroup& g) {
  json members = json::object();
  for (const auto& [lang, path] : g.members) members[lang.code()] = path;
  return json{{"kind", to_string(g.kind)}, {"members", std::move(members)}};
}

json alignment_to_json(const ParallelTexts& pt) {
  json groups = json::array();
  for (const auto& g : pt.groups) groups.push_back(group_to_json(g));
  json entirety = json::object();
  for (const auto& [lang, e] : pt.entirety) entirety[lang.code()] = e.to_string();
  return json{{"granularity",
               {{"level", to_string(pt.granularity.level)},
                {"coverage", pt.granularity.coverage == Coverage::full ? "full" : "partial"}}},
              {"provenance", pt.provenance},
              {"entirety", std::move(entirety)},
              {"groups", std::move(groups)}};
}

}  // namespace

namespace detail {

bool safe_member_name(std::string_view name) {
  if (name.empty() || name.front() == '/' || name.back() == '/' || !utf8::is_valid(name)) return false;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto slash = name.find('/', start);
    if (slash == std::string_view::npos) slash = name.size();
    const auto part = name.substr(start, slash - start);
    if (part.empty() || part == "." || part == "..") return false;
    start = slash + 1;
  }
  for (unsigned char c : name) {
    if (c < 0x20 || c == '\\' || c == 0x7f) return false;
  }
  return true;
}

bool well_formed_uri(std::string_view uri) {
  const auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == uri.size()) return false;
  const auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
  if (!alpha(uri[0])) return false;
  for (std::size_t k = 1; k < colon; ++k) {
    const char c = uri[k];
    if (!alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.') return false;
  }
  for (std::size_t k = colon + 1; k < uri.size(); ++k) {
    const auto c = static_cast<unsigned char>(uri[k]);
    if (c <= 0x20 || c == 0x7f || std::string_view("<>\"{}|\\^`").find(static_cast<char>(c)) != std::string_view::npos) {
      return false;
    }
  }
  return utf8::is_valid(uri);
}

bool valid_header_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                    c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

HeaderParse parse_header(std::string_view text) {
  HeaderParse out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    start = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    const auto key = colon == std::string_view::npos ? line : line.substr(0, colon);
    if (colon == std::string_view::npos || !valid_header_key(key)) {
      out.problems.push_back({"header-syntax", "line " + std::to_string(line_no) + " is not 'key: value'"});
      continue;
    }
    auto value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.remove_prefix(1);
    if (!out.fields.emplace(std::string(key), std::string(value)).second) {
      out.problems.push_back({"header-duplicate-key", "key '" + std::string(key) + "' repeats on line " +
                                                          std::to_string(line_no)});
    }
  }
  return out;
}

std::string percent_encode_path(std::string_view path) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : path) {
    const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                       c == '-' || c == '_' || c == '.' || c == '~' || c == '/';
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::optional<std::string> percent_decode(std::string_view text) {
  std::string out;
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] != '%') {
      out += text[k];
      continue;
    }
    if (k + 2 >= text.size()) return std::nullopt;
    auto hex = [](char c) -> int {
      if (c >= '0' && c <= '9') return c - '0';
      if (c >= 'a' && c <= 'f') return c - 'a' + 10;
      if (c >= 'A' && c <= 'F') return c - 'A' + 10;
      return -1;
    };
    const int hi = hex(text[k + 1]);
    const int lo = hex(text[k + 2]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out += static_cast<char>(hi * 16 + lo);
    k += 2;
  }
  return out;
}

ParallelTexts alignment_from_json(std::string_view text, const std::map<LanguageTag, SegmentedText>& versions) {
  ParallelTexts pt;
  try {
    const auto j = json::parse(text);
    const auto& g = j.at("granularity");
    const auto level = parse_segment_kind(g.at("level").get<std::string>());
    const auto coverage = g.at("coverage").get<std::string>();
    if (!level || (coverage != "full" && coverage != "partial")) invalid("bad granularity in alignment");
    pt.granularity = {*level, coverage == "full" ? Coverage::full : Coverage::partial};
    pt.provenance = j.value("provenance", "");
    for (const auto& [code, value] : j.at("entirety").items()) {
      pt.entirety.emplace(parse_tag(code), EntiretySet::parse(value.get<std::string>()));
    }
    for (const auto& jg : j.at("groups")) {
      AlignmentGroup group;
      const auto kind = parse_segment_kind(jg.at("kind").get<std::string>());
      if (!kind) invalid("bad group kind in alignment");
      group.kind = *kind;
      for (const auto& [code, path] : jg.at("members").items()) {
        const auto lang = parse_tag(code);
        auto v = versions.find(lang);
        if (v == versions.end()) invalid("alignment group refers to missing version '" + code + "'");
        SegmentPath p = path.get<SegmentPath>();
        const Segment* seg = &v->second.root();
        for (auto idx : p) {
          if (idx >= seg->children.size()) invalid("alignment group path out of range for '" + code + "'");
          seg = &seg->children[idx];
        }
        if (seg->kind != group.kind) invalid("alignment group kind differs from segment kind for '" + code + "'");
        group.members.emplace(lang, std::move(p));
      }
      pt.groups.push_back(std::move(group));
    }
  } catch (const json::exception& e) {
    invalid(std::string("bad alignment document: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidDossier) throw;
    invalid(std::string("bad alignment document: ") + e.what());
  }
  pt.versions = versions;
  return pt;
}

std::vector<ExternalLink> parse_external_links(std::string_view text, std::vector<std::string>* problems) {
  std::vector<ExternalLink> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto problem = [&](const std::string& what) {
    if (!problems) invalid("external.links: " + what);
    problems->push_back(what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    ExternalLink link;
    std::string kind;
    fields >> link.uri >> kind;
    if (kind == "version") {
      std::string code;
      fields >> code;
      link.language = try_parse_tag(code);
      if (!link.language) {
        problem("line " + std::to_string(line_no) + ": bad language '" + code + "'");
        continue;
      }
    } else if (kind == "artefact") {
      std::string role;
      fields >> role;
      link.role = parse_artefact_role(role);
      std::getline(fields >> std::ws, link.name);
      if (!link.role || link.name.empty()) {
        problem("line " + std::to_string(line_no) + ": expected '<uri> artefact <role> <name>'");
        continue;
      }
    } else {
      problem("line " + std::to_string(line_no) + ": expected 'version' or 'artefact' after the URI");
      continue;
    }
    out.push_back(std::move(link));
  }
  return out;
}

}  // namespace detail

std::string_view to_string(ArtefactRole role) noexcept {
  switch (role) {
    case ArtefactRole::translation_memory: return "translation-memory";
    case ArtefactRole::background_document: return "background-document";
    case ArtefactRole::other: return "other";
  }
  return "other";
}

std::optional<ArtefactRole> parse_artefact_role(std::string_view name) noexcept {
  for (auto r : {ArtefactRole::translation_memory, ArtefactRole::background_document, ArtefactRole::other}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

std::string_view to_string(MedForm form) noexcept {
  switch (form) {
    case MedForm::self_contained: return "self-contained";
    case MedForm::mix: return "mix";
    case MedForm::external_only: return "external-only";
  }
  return "mix";
}

std::string_view to_string(Severity s) noexcept { return s == Severity::error ? "error" : "warning"; }

MedForm MedDossier::form() const {
  std::size_t embedded = parallel.versions.size();
  for (const auto& [lang, files] : sources) embedded += files.size();
  std::size_t external = external_versions.size();
  for (const auto& a : artefacts) (a.uri ? external : embedded) += 1;
  if (external == 0) return MedForm::self_contained;
  return embedded == 0 ? MedForm::external_only : MedForm::mix;
}

std::vector<LanguageTag> MedDossier::declared_languages() const {
  auto it = header.find("languages");
  if (it == header.end()) return {};
  return parse_tag_list(it->second);
}

bool operator==(const MedDossier& a, const MedDossier& b) {
  if (a.header != b.header || a.parallel != b.parallel || a.external_versions != b.external_versions) return false;
  if (sorted(a.artefacts) != sorted(b.artefacts)) return false;
  if (a.sources.size() != b.sources.size()) return false;
  for (auto ia = a.sources.begin(), ib = b.sources.begin(); ia != a.sources.end(); ++ia, ++ib) {
    if (ia->first != ib->first || sorted(ia->second) != sorted(ib->second)) return false;
  }
  return true;
}

MedDossier make_dossier(std::string id, std::string title, const std::vector<LanguageTag>& languages) {
  MedDossier med;
  med.header["id"] = std::move(id);
  med.header["title"] = std::move(title);
  std::string list;
  for (const auto& l : languages) list += (list.empty() ? "" : ",") + l.code();
  med.header["languages"] = list;
  return med;
}

void update_statistics(MedDossier& med) {
  med.header["statistics.versions"] = std::to_string(med.parallel.versions.size() + med.external_versions.size());
  med.header["statistics.groups"] = std::to_string(med.parallel.groups.size());
  med.header["statistics.artefacts"] = std::to_string(med.artefacts.size());
}

std::vector<zip::Member> pack_members(const MedDossier& med) {
  for (const auto& [key, value] : med.header) {
    if (!detail::valid_header_key(key)) invalid("bad header key '" + key + "'");
    if (value.find_first_of("\r\n") != std::string::npos || !utf8::is_valid(value)) {
      invalid("header value for '" + key + "' must be one line of UTF-8");
    }
  }
  if (med.header.count("id") == 0 || med.header.at("id").empty()) invalid("header has no dossier id");
  if (med.header.count("languages") == 0) invalid("header has no languages list");
  try {
    if (med.declared_languages().empty()) invalid("header declares no language");
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidDossier) throw;
    invalid(std::string("bad languages list: ") + e.what());
  }

  std::vector<zip::Member> out;
  std::string meta;
  for (const auto& [key, value] : med.header) meta += key + ": " + value + "\n";
  out.push_back({"header/med.meta", std::move(meta)});

  for (const auto& [lang, text] : med.parallel.versions) {
    if (text.language() != lang) invalid("version filed under '" + lang.code() + "' is in " + text.language().code());
    if (med.external_versions.contains(lang)) invalid("version '" + lang.code() + "' is both embedded and external");
    out.push_back({"parallel/" + lang.code() + "/text.txt", text.source()});
    out.push_back({"parallel/_segments/" + lang.code() + ".json", serialize_segmentation(text)});
  }
  for (const auto& [lang, files] : med.sources) {
    for (const auto& f : files) {
      if (!detail::safe_member_name(f.name) || f.name == "text.txt") invalid("bad source file name '" + f.name + "'");
      out.push_back({"parallel/" + lang.code() + "/" + f.name, f.content});
    }
  }
  if (med.parallel != ParallelTexts{}) {
    out.push_back({"parallel/_alignment.json", alignment_to_json(med.parallel).dump(1) + "\n"});
  }

  std::string links;
  for (const auto& [lang, uri] : med.external_versions) {
    if (!detail::well_formed_uri(uri)) invalid("bad URI '" + uri + "'");
    links += uri + " version " + lang.code() + "\n";
  }
  for (const auto& a : sorted(med.artefacts)) {
    if (a.content.has_value() == a.uri.has_value()) {
      invalid("artefact '" + a.name + "' must be either embedded or a reference");
    }
    if (a.uri) {
      if (!detail::well_formed_uri(*a.uri)) invalid("bad URI '" + *a.uri + "'");
      if (a.name.empty() || a.name.find_first_of("\r\n") != std::string::npos || a.name != utf8::normalize_whitespace(a.name)) {
        invalid("bad name for referenced artefact '" + a.name + "'");
      }
      links += *a.uri + " artefact " + std::string(to_string(a.role)) + " " + a.name + "\n";
    } else {
      if (!detail::safe_member_name(a.name)) invalid("bad artefact name '" + a.name + "'");
      out.push_back({"artefacts/" + std::string(to_string(a.role)) + "/" + a.name, *a.content});
    }
  }
  if (!links.empty()) out.push_back({"external.links", std::move(links)});
  out.push_back({"index.html", generate_index(med)});

  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (out[k].name == out[k - 1].name) invalid("two components map to '" + out[k].name + "'");
  }
  return out;
}

std::string pack(const MedDossier& med) { return zip::write(pack_members(med)); }

MedDossier unpack_members(const std::vector<zip::Member>& members) {
  const zip::Member* header = nullptr;
  for (const auto& m : members) {
    if (m.name == "header/med.meta") header = &m;
  }
  if (!header) throw Error(ErrorCode::MissingHeader, "archive has no header/med.meta");
  if (!utf8::is_valid(header->data)) invalid("header is not UTF-8");
  auto parsed = detail::parse_header(header->data);
  if (!parsed.problems.empty()) invalid("header: " + parsed.problems.front().second);

  MedDossier med;
  med.header = std::move(parsed.fields);
  if (med.header.count("id") == 0 || med.header.count("languages") == 0) invalid("header lacks id or languages");

  std::map<LanguageTag, std::string> texts;
  std::map<LanguageTag, std::string> segmentations;
  const std::string* alignment = nullptr;
  for (const auto& m : members) {
    const std::string_view name = m.name;
    if (&m == header || name == "index.html") continue;
    if (!detail::safe_member_name(name)) invalid("unsafe member name '" + m.name + "'");
    if (name == "parallel/_alignment.json") {
      alignment = &m.data;
      continue;
    }
    if (name == "external.links") {
      for (auto& link : detail::parse_external_links(m.data, nullptr)) {
        if (link.language) {
          med.external_versions[*link.language] = link.uri;
        } else {
          med.artefacts.push_back({*link.role, link.name, std::nullopt, link.uri});
        }
      }
      continue;
    }
    if (name.starts_with("parallel/_segments/") && name.ends_with(".json")) {
      const auto code = name.substr(19, name.size() - 19 - 5);
      if (auto lang = try_parse_tag(code)) {
        segmentations[*lang] = m.data;
        continue;
      }
    }
    if (name.starts_with("parallel/") && name.size() > 12 && name[11] == '/') {
      if (auto lang = try_parse_tag(name.substr(9, 2)); lang && lang->code() == name.substr(9, 2)) {
        const auto rest = std::string(name.substr(12));
        if (rest == "text.txt") {
          texts[*lang] = m.data;
        } else {
          med.sources[*lang].push_back({rest, m.data});
        }
        continue;
      }
    }
    if (name.starts_with("artefacts/")) {
      const auto slash = name.find('/', 10);
      if (slash != std::string_view::npos) {
        if (auto role = parse_artefact_role(name.substr(10, slash - 10))) {
          med.artefacts.push_back({*role, std::string(name.substr(slash + 1)), m.data, std::nullopt});
          continue;
        }
      }
    }
    med.artefacts.push_back({ArtefactRole::other, m.name, m.data, std::nullopt});
  }

  std::map<LanguageTag, SegmentedText> versions;
  for (const auto& [lang, text] : texts) {
    auto seg = segmentations.find(lang);
    if (seg == segmentations.end()) {
      if (!utf8::is_valid(text)) invalid("text of '" + lang.code() + "' is not UTF-8");
      Segment root;
      root.span = {0, text.size()};
      versions.emplace(lang, SegmentedText(lang, text, std::move(root)));
      continue;
    }
    try {
      auto st = deserialize_segmentation(seg->second);
      if (st.source() != text || st.language() != lang) invalid("segmentation of '" + lang.code() + "' does not match its text");
      versions.emplace(lang, std::move(st));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidDossier) throw;
      invalid("segmentation of '" + lang.code() + "': " + e.what());
    }
    segmentations.erase(seg);
  }
  if (!segmentations.empty()) invalid("segmentation without text for '" + segmentations.begin()->first.code() + "'");

  if (alignment) {
    med.parallel = detail::alignment_from_json(*alignment, versions);
  } else if (!versions.empty()) {
    med.parallel.versions = std::move(versions);
    med.parallel.granularity = parallel_granularity(med.parallel.versions);
  }
  return med;
}

MedDossier unpack(std::string_view archive) { return unpack_members(zip::read(archive)); }

std::vector<zip::Member> read_directory(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw Error(ErrorCode::Io, directory.string() + " is not a directory");
  std::vector<zip::Member> out;
  for (const auto& entry : fs::recursive_directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + entry.path().string());
    std::ostringstream buf;
    buf << in.rdbuf();
    out.push_back({fs::relative(entry.path(), directory).generic_string(), buf.str()});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

void write_directory(const std::vector<zip::Member>& members, const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  for (const auto& m : members) {
    if (!detail::safe_member_name(m.name)) throw Error(ErrorCode::InvalidDossier, "unsafe member name '" + m.name + "'");
    const auto path = directory / fs::path(m.name);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + path.parent_path().string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(m.data.data(), static_cast<std::streamsize>(m.data.size()));
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  }
}

}  // namespace partext
