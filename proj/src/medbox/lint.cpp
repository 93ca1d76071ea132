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
#include <regex>
#include <set>

#include "medbox_internal.hpp"
#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/medbox.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

bool looks_like_malayalam_typo(std::string_view label) {
  return label.size() == 2 && (label[0] == 'm' || label[0] == 'M') &&
         std::string_view("1|!iI").find(label[1]) != std::string_view::npos;
}

class Linter {
 public:
  explicit Linter(const std::vector<zip::Member>& members) {
    for (const auto& m : members) files_.emplace(m.name, &m.data);
  }

  std::vector<LintDiagnostic> run() {
    for (const auto& [name, data] : files_) {
      if (detail::safe_member_name(name)) continue;
      error("unsafe-path", name, "member name escapes the dossier or is not UTF-8");
      claim(name);
    }
    check_header();
    check_parallel();
    check_external_links();
    check_artefacts();
    check_versions_against_languages();
    check_index();
    check_stray();
    std::sort(out_.begin(), out_.end(), [](const LintDiagnostic& a, const LintDiagnostic& b) {
      return std::tie(a.member, a.code, a.message) < std::tie(b.member, b.code, b.message);
    });
    return std::move(out_);
  }

 private:
  void report(Severity s, std::string code, std::string member, std::string message) {
    out_.push_back({s, std::move(code), std::move(member), std::move(message)});
  }
  void error(std::string code, std::string member, std::string message) {
    report(Severity::error, std::move(code), std::move(member), std::move(message));
  }
  void warning(std::string code, std::string member, std::string message) {
    report(Severity::warning, std::move(code), std::move(member), std::move(message));
  }

  const std::string* file(const std::string& name) const {
    auto it = files_.find(name);
    return it == files_.end() ? nullptr : it->second;
  }

  void claim(const std::string& name) { known_.insert(name); }

  void check_header() {
    static const std::string kHeader = "header/med.meta";
    const auto* text = file(kHeader);
    if (!text) {
      error("missing-header", kHeader, "the dossier has no header");
      return;
    }
    claim(kHeader);
    if (!utf8::is_valid(*text)) {
      error("invalid-encoding", kHeader, "header is not UTF-8");
      return;
    }
    auto parsed = detail::parse_header(*text);
    for (auto& [code, message] : parsed.problems) error(code, kHeader, message);
    header_ = std::move(parsed.fields);
    if (header_.count("id") == 0 || header_["id"].empty()) error("missing-id", kHeader, "header has no dossier id");
    auto langs = header_.find("languages");
    if (langs == header_.end() || utf8::normalize_whitespace(langs->second).empty()) {
      error("missing-languages", kHeader, "header declares no languages");
      return;
    }
    std::string_view list = langs->second;
    while (!list.empty()) {
      const auto comma = list.find(',');
      const auto item = utf8::normalize_whitespace(list.substr(0, comma));
      list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
      if (item.empty()) continue;
      if (auto tag = try_parse_tag(item)) {
        declared_.push_back(*tag);
      } else if (looks_like_malayalam_typo(item)) {
        error("invalid-language", kHeader,
              "label '" + item + "' is not a language code; 'ml' is reserved for Malayalam, use 'mm' for "
              "multilingual content");
      } else {
        error("invalid-language", kHeader, "label '" + item + "' is not a known two-letter language code");
      }
    }
  }

  void check_parallel() {
    std::map<LanguageTag, std::string> texts;
    std::map<LanguageTag, std::string> seg_members;
    for (const auto& [name, data] : files_) {
      if (!name.starts_with("parallel/")) continue;
      if (name == "parallel/_alignment.json") continue;
      claim(name);
      if (name.starts_with("parallel/_segments/")) {
        const auto code = name.substr(19, name.size() - 19 - (name.ends_with(".json") ? 5 : 0));
        auto lang = try_parse_tag(code);
        if (!name.ends_with(".json") || !lang || lang->code() != code) {
          error("bad-parallel-entry", name, "segmentation files are named <lang>.json");
        } else {
          seg_members[*lang] = name;
        }
        continue;
      }
      const auto slash = name.find('/', 9);
      const auto code = name.substr(9, slash == std::string::npos ? std::string::npos : slash - 9);
      auto lang = try_parse_tag(code);
      if (slash == std::string::npos || !lang || lang->code() != code) {
        error("bad-parallel-entry", name, "expected parallel/<lang>/<file>");
        continue;
      }
      present_.insert(*lang);
      if (name.substr(slash + 1) == "text.txt") {
        if (!utf8::is_valid(*data)) {
          error("invalid-encoding", name, "version text is not UTF-8");
        } else {
          texts[*lang] = name;
        }
      }
    }

    for (const auto& [lang, member] : seg_members) {
      auto t = texts.find(lang);
      if (t == texts.end()) {
        error("segmentation-mismatch", member, "segmentation without parallel/" + lang.code() + "/text.txt");
        continue;
      }
      try {
        auto st = deserialize_segmentation(*file(member));
        if (st.source() != *file(t->second) || st.language() != lang) {
          error("segmentation-mismatch", member, "segmentation does not describe " + t->second);
          continue;
        }
        for (const auto& sw : st.switches()) observed_.insert(sw.language);
        versions_.emplace(lang, std::move(st));
      } catch (const Error& e) {
        error("segmentation-invalid", member, e.what());
      }
    }
    for (const auto& [lang, member] : texts) {
      if (versions_.contains(lang) || seg_members.contains(lang)) continue;
      Segment root;
      root.span = {0, file(member)->size()};
      versions_.emplace(lang, SegmentedText(lang, *file(member), std::move(root)));
    }

    static const std::string kAlignment = "parallel/_alignment.json";
    if (const auto* text = file(kAlignment)) {
      claim(kAlignment);
      try {
        alignment_ = detail::alignment_from_json(*text, versions_);
      } catch (const Error& e) {
        error("alignment-invalid", kAlignment, e.what());
      }
    }
  }

  void check_external_links() {
    static const std::string kLinks = "external.links";
    const auto* text = file(kLinks);
    if (!text) return;
    claim(kLinks);
    std::vector<std::string> problems;
    for (const auto& link : detail::parse_external_links(*text, &problems)) {
      if (!detail::well_formed_uri(link.uri)) error("bad-uri", kLinks, "'" + link.uri + "' is not a well-formed URI");
      if (link.language) external_.insert(*link.language);
    }
    for (const auto& p : problems) error("external-links-syntax", kLinks, p);
  }

  void check_artefacts() {
    for (const auto& [name, data] : files_) {
      if (!name.starts_with("artefacts/")) continue;
      claim(name);
      const auto slash = name.find('/', 10);
      const auto role = parse_artefact_role(name.substr(10, slash == std::string::npos ? std::string::npos : slash - 10));
      if (slash == std::string::npos || !role) {
        warning("unknown-artefact-role", name, "not under artefacts/<role>/; it is kept as role 'other'");
        continue;
      }
      if (*role != ArtefactRole::translation_memory) continue;
      try {
        if (name.ends_with(".tmx")) {
          (void)import_tmx(*data);
        } else if (name.ends_with(".csv")) {
          (void)import_csv(*data);
        }
      } catch (const Error& e) {
        error(name.ends_with(".tmx") ? "bad-tmx" : "bad-csv", name, e.what());
      }
    }
  }

  void check_versions_against_languages() {
    if (!header_.count("languages")) return;
    std::set<LanguageTag> available = present_;
    available.insert(external_.begin(), external_.end());
    std::set<LanguageTag> observed = available;
    observed.insert(observed_.begin(), observed_.end());

    FileLanguageMetadata meta;
    for (const auto& l : declared_) {
      if (std::find(meta.declared.begin(), meta.declared.end(), l) == meta.declared.end()) meta.declared.push_back(l);
    }
    bool ml_misuse = false;
    for (const auto& d : check_labelling(meta, observed)) {
      if (d.issue != LabellingIssue::malayalam_misuse) continue;
      error("ml-misuse", "header/med.meta", d.message);
      ml_misuse = true;
    }

    bool open_ended = ml_misuse;
    for (const auto& l : declared_) open_ended = open_ended || l.is_multilingual() || l.kind() == TagKind::undetermined;
    for (const auto& l : declared_) {
      if (!l.is_standard() || available.contains(l)) continue;
      if (ml_misuse && l.code() == "ml") continue;
      if (alignment_ && alignment_->entirety.contains(l)) continue;
      error("missing-version", "header/med.meta",
            "declared language '" + l.code() + "' has no version and no entirety attribute explaining its absence");
    }
    if (open_ended) return;
    for (const auto& l : available) {
      if (std::find(declared_.begin(), declared_.end(), l) == declared_.end()) {
        warning("undeclared-version", "header/med.meta", "version '" + l.code() + "' is not among the declared languages");
      }
    }
  }

  void check_index() {
    static const std::string kIndex = "index.html";
    const auto* html = file(kIndex);
    if (!html) {
      warning("missing-index", kIndex, "no main index; regenerate it with the index generator");
      return;
    }
    claim(kIndex);
    static const std::regex kHref(R"re(href\s*=\s*"([^"]*)")re", std::regex::icase);
    static const std::regex kScheme(R"(^[A-Za-z][A-Za-z0-9+.-]*:)");
    for (auto it = std::sregex_iterator(html->begin(), html->end(), kHref); it != std::sregex_iterator(); ++it) {
      std::string target = (*it)[1].str();
      target = replace_entities(target);
      if (target.empty() || target.front() == '#' || std::regex_search(target, kScheme)) continue;
      target = target.substr(0, target.find_first_of("?#"));
      auto decoded = detail::percent_decode(target);
      if (!decoded || !files_.contains(*decoded)) {
        error("broken-link", kIndex, "link '" + target + "' does not resolve inside the dossier");
      }
    }
  }

  static std::string replace_entities(const std::string& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s.compare(k, 5, "&amp;") == 0) {
        out += '&';
        k += 4;
      } else if (s.compare(k, 6, "&quot;") == 0) {
        out += '"';
        k += 5;
      } else if (s.compare(k, 4, "&lt;") == 0) {
        out += '<';
        k += 3;
      } else if (s.compare(k, 4, "&gt;") == 0) {
        out += '>';
        k += 3;
      } else {
        out += s[k];
      }
    }
    return out;
  }

  void check_stray() {
    for (const auto& [name, data] : files_) {
      if (!known_.contains(name)) warning("stray-member", name, "outside the dossier layout; kept as an artefact of role 'other'");
    }
  }

  std::map<std::string, const std::string*> files_;
  std::set<std::string> known_;
  std::map<std::string, std::string> header_;
  std::vector<LanguageTag> declared_;
  std::set<LanguageTag> present_;
  std::set<LanguageTag> external_;
  std::set<LanguageTag> observed_;
  std::map<LanguageTag, SegmentedText> versions_;
  std::optional<ParallelTexts> alignment_;
  std::vector<LintDiagnostic> out_;
};

}  // namespace

std::vector<LintDiagnostic> validate_members(const std::vector<zip::Member>& members) {
  return Linter(members).run();
}

std::vector<LintDiagnostic> validate(std::string_view archive) {
  std::vector<zip::Member> members;
  try {
    members = zip::read(archive);
  } catch (const Error& e) {
    return {{Severity::error, "not-a-zip", "", e.what()}};
  }
  return validate_members(members);
}

std::vector<LintDiagnostic> validate_directory(const std::filesystem::path& directory) {
  std::vector<zip::Member> members;
  try {
    members = read_directory(directory);
  } catch (const Error& e) {
    return {{Severity::error, "unreadable", "", e.what()}};
  }
  return validate_members(members);
}

}  // namespace partext
