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
#include <set>

#include "medbox_internal.hpp"
#include "partext/medbox.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

std::string esc(std::string_view s) { return utf8::escape_xml(s, true); }

std::string link(std::string_view href, std::string_view text) {
  return "<a href=\"" + esc(href) + "\">" + esc(text) + "</a>";
}

std::string field(const MedDossier& med, const std::string& key) {
  auto it = med.header.find(key);
  return it == med.header.end() ? std::string() : it->second;
}

}  // namespace

std::string generate_index(const MedDossier& med) {
  const auto id = field(med, "id");
  const auto title = field(med, "title");
  std::string out;
  out += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>" + esc(title.empty() ? id : title) + "</title>\n</head>\n<body>\n";
  out += "<h1>" + esc(title.empty() ? id : title) + "</h1>\n";
  out += "<p>Dossier <code>" + esc(id) + "</code>, form " + std::string(to_string(med.form())) + ".</p>\n";

  out += "<h2>Header</h2>\n<table class=\"header\">\n";
  for (const auto& [key, value] : med.header) {
    out += "<tr><th>" + esc(key) + "</th><td>" + esc(value) + "</td></tr>\n";
  }
  out += "</table>\n";

  std::set<LanguageTag> langs;
  for (const auto& [lang, v] : med.parallel.versions) langs.insert(lang);
  for (const auto& [lang, uri] : med.external_versions) langs.insert(lang);
  for (const auto& [lang, e] : med.parallel.entirety) langs.insert(lang);

  out += "<h2>Linguistic versions</h2>\n<table class=\"versions\">\n";
  out += "<tr><th>Language</th><th>Name</th><th>Entirety</th><th>Text</th><th>Sources</th></tr>\n";
  for (const auto& lang : langs) {
    out += "<tr class=\"version\"><td>" + esc(lang.code()) + "</td><td>" + esc(language_name(lang)) + "</td><td>";
    auto e = med.parallel.entirety.find(lang);
    out += e == med.parallel.entirety.end() ? "-" : esc(e->second.to_string());
    out += "</td><td>";
    if (med.parallel.versions.contains(lang)) {
      out += link("parallel/" + lang.code() + "/text.txt", "text");
    } else if (auto x = med.external_versions.find(lang); x != med.external_versions.end()) {
      out += link(x->second, "external");
    } else {
      out += "absent";
    }
    out += "</td><td>";
    if (auto s = med.sources.find(lang); s != med.sources.end()) {
      auto files = s->second;
      std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
      bool first = true;
      for (const auto& f : files) {
        if (!first) out += ", ";
        first = false;
        out += link(detail::percent_encode_path("parallel/" + lang.code() + "/" + f.name), f.name);
      }
    }
    out += "</td></tr>\n";
  }
  out += "</table>\n";

  auto artefacts = med.artefacts;
  std::sort(artefacts.begin(), artefacts.end(), [](const Artefact& a, const Artefact& b) {
    return std::tie(a.role, a.name, a.uri) < std::tie(b.role, b.name, b.uri);
  });
  out += "<h2>Artefacts</h2>\n<ul class=\"artefacts\">\n";
  for (const auto& a : artefacts) {
    const auto role = std::string(to_string(a.role));
    out += "<li>" + role + ": ";
    out += a.uri ? link(*a.uri, a.name)
                 : link(detail::percent_encode_path("artefacts/" + role + "/" + a.name), a.name);
    out += "</li>\n";
  }
  out += "</ul>\n</body>\n</html>\n";
  return out;
}

}  // namespace partext
