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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/medbox.hpp"
#include "support/random_med.hpp"

using namespace partext;
namespace fs = std::filesystem;

namespace {

const LanguageTag kEn = parse_tag("en");
const LanguageTag kEs = parse_tag("es");
const LanguageTag kRu = parse_tag("ru");

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::set<std::string> names(const std::vector<zip::Member>& members) {
  std::set<std::string> out;
  for (const auto& m : members) out.insert(m.name);
  return out;
}

std::string tmx_sample() {
  LinguisticTable t("sample");
  LinguisticRecord r;
  r.segments[kEn] = "hello world";
  r.segments[kEs] = "Hola mundo";
  t.insert(r);
  return export_tmx(t);
}

MedDossier bilingual() {
  auto med = make_dossier("d1", "Bilingual", {kEn, kEs});
  auto en = segment_text("One. Two.\n\n", kEn);
  auto es = segment_text("Uno. Dos.\n\n", kEs);
  med.parallel = align({{kEn, en}, {kEs, es}}, SegmentKind::sentence, "test");
  med.artefacts.push_back({ArtefactRole::translation_memory, "memory.tmx", tmx_sample(), std::nullopt});
  return med;
}

std::size_t count_matches(const std::string& text, const std::regex& re) {
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re), std::sregex_iterator()));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string render(const std::vector<LintDiagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += std::string(to_string(d.severity)) + " " + d.code + " " + d.member + "\n";
  return out;
}

}  // namespace

TEST(Zip, RoundTripAndDeterminism) {
  std::vector<zip::Member> members{{"b.txt", std::string(5000, 'x')}, {"a/ü.bin", std::string("\0\1\2", 3)}, {"empty", ""}};
  const auto bytes = zip::write(members);
  EXPECT_EQ(bytes, zip::write({members[2], members[0], members[1]}));
  const auto back = zip::read(bytes);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].name, "a/ü.bin");
  EXPECT_EQ(back[1], members[0]);
  EXPECT_EQ(back[2].data, "");
  EXPECT_LT(bytes.size(), 1000u);
}

TEST(Zip, Rejects) {
  EXPECT_EQ(error_of([] { zip::read("not a zip at all, certainly not"); }), ErrorCode::NotAZip);
  EXPECT_EQ(error_of([] { zip::read(""); }), ErrorCode::NotAZip);
  auto bytes = zip::write({{"a.txt", "hello hello hello"}});
  auto corrupt = bytes;
  corrupt[30 + 5] ^= 0x55;
  EXPECT_EQ(error_of([&] { zip::read(corrupt); }), ErrorCode::NotAZip);
  EXPECT_EQ(error_of([&] { zip::read(bytes.substr(0, bytes.size() - 3)); }), ErrorCode::NotAZip);
  EXPECT_EQ(error_of([] { zip::write({{"a", "1"}, {"a", "2"}}); }), ErrorCode::InvalidArgument);
}

TEST(Medbox, HeaderOnlyLayout) {
  auto med = make_dossier("d0", "Empty", {kEn});
  EXPECT_EQ(names(pack_members(med)), (std::set<std::string>{"header/med.meta", "index.html"}));
  EXPECT_EQ(names(zip::read(pack(med))), (std::set<std::string>{"header/med.meta", "index.html"}));
  EXPECT_EQ(med.form(), MedForm::self_contained);
}

TEST(Medbox, BilingualLayout) {
  auto members = names(pack_members(bilingual()));
  EXPECT_EQ(members, (std::set<std::string>{"artefacts/translation-memory/memory.tmx", "header/med.meta", "index.html",
                                            "parallel/_alignment.json", "parallel/_segments/en.json",
                                            "parallel/_segments/es.json", "parallel/en/text.txt",
                                            "parallel/es/text.txt"}));
}

TEST(Medbox, HeaderFormat) {
  auto med = make_dossier("d0", "Title: with colon", {kEn, kEs});
  auto members = pack_members(med);
  EXPECT_EQ(members[0].name, "header/med.meta");
  EXPECT_EQ(members[0].data, "id: d0\nlanguages: en,es\ntitle: Title: with colon\n");
}

TEST(Medbox, PackRejectsInvalid) {
  auto no_id = make_dossier("", "t", {kEn});
  EXPECT_EQ(error_of([&] { pack(no_id); }), ErrorCode::InvalidDossier);
  auto bad_key = make_dossier("x", "t", {kEn});
  bad_key.header["bad key"] = "v";
  EXPECT_EQ(error_of([&] { pack(bad_key); }), ErrorCode::InvalidDossier);
  auto bad_value = make_dossier("x", "t\nsecond", {kEn});
  EXPECT_EQ(error_of([&] { pack(bad_value); }), ErrorCode::InvalidDossier);
  auto both = bilingual();
  both.external_versions[kEn] = "https://example.org/en";
  EXPECT_EQ(error_of([&] { pack(both); }), ErrorCode::InvalidDossier);
  auto bad_uri = make_dossier("x", "t", {kEn});
  bad_uri.external_versions[kEn] = "not a uri";
  EXPECT_EQ(error_of([&] { pack(bad_uri); }), ErrorCode::InvalidDossier);
  auto escape = make_dossier("x", "t", {kEn});
  escape.artefacts.push_back({ArtefactRole::other, "../evil", "x", std::nullopt});
  EXPECT_EQ(error_of([&] { pack(escape); }), ErrorCode::InvalidDossier);
}

TEST(Medbox, RoundTrip) {
  auto med = bilingual();
  med.sources[kEn].push_back({"original.rtf", "{\\rtf1 One. Two.}"});
  med.artefacts.push_back({ArtefactRole::background_document, "Glossary", std::nullopt, "https://example.org/glossary"});
  med.external_versions[kRu] = "https://example.org/ru.txt";
  med.header["languages"] = "en,es,ru";
  update_statistics(med);
  EXPECT_EQ(med.form(), MedForm::mix);
  const auto bytes = pack(med);
  EXPECT_EQ(unpack(bytes), med);
  EXPECT_EQ(pack(unpack(bytes)), bytes);
}

TEST(Medbox, ExternalOnly) {
  auto med = make_dossier("x", "t", {kEn});
  med.external_versions[kEn] = "https://example.org/en.txt";
  EXPECT_EQ(med.form(), MedForm::external_only);
  EXPECT_EQ(unpack(pack(med)), med);
}

TEST(Medbox, RandomRoundTrips) {
  partext::testing::RandomText rt(2026);
  for (int round = 0; round < 60; ++round) {
    auto med = partext::testing::random_dossier(rt);
    const auto bytes = pack(med);
    auto back = unpack(bytes);
    ASSERT_EQ(back, med) << "round " << round;
    ASSERT_EQ(pack(back), bytes) << "round " << round;
    ASSERT_EQ(validate(bytes), std::vector<LintDiagnostic>{}) << "round " << round << "\n" << render(validate(bytes));
  }
}

TEST(Medbox, UnpackErrors) {
  EXPECT_EQ(error_of([] { unpack("garbage"); }), ErrorCode::NotAZip);
  EXPECT_EQ(error_of([] { unpack(zip::write({{"index.html", "<html></html>"}})); }), ErrorCode::MissingHeader);
  EXPECT_EQ(error_of([] { unpack(zip::write({{"header/med.meta", "id: x\n"}})); }), ErrorCode::InvalidDossier);
  EXPECT_EQ(error_of([] { unpack(zip::write({{"header/med.meta", "id: x\nlanguages: en\nbroken line\n"}})); }),
            ErrorCode::InvalidDossier);
  EXPECT_EQ(error_of([] {
              unpack(zip::write({{"header/med.meta", "id: x\nlanguages: en\n"}, {"parallel/_segments/en.json", "{}"}}));
            }),
            ErrorCode::InvalidDossier);
}

TEST(Medbox, StrayFilePreserved) {
  auto members = pack_members(bilingual());
  const auto before = unpack_members(members).artefacts.size();
  members.push_back({"notes/readme.txt", "keep me"});
  members.push_back({"artefacts/unknown-role/x.bin", "y"});
  auto med = unpack_members(members);
  ASSERT_EQ(med.artefacts.size(), before + 2);
  const Artefact stray{ArtefactRole::other, "notes/readme.txt", "keep me", std::nullopt};
  EXPECT_NE(std::find(med.artefacts.begin(), med.artefacts.end(), stray), med.artefacts.end());
  auto repacked = unpack(pack(med));
  EXPECT_NE(std::find(repacked.artefacts.begin(), repacked.artefacts.end(), stray), repacked.artefacts.end());
}

TEST(Medbox, PlainTextWithoutSegmentation) {
  auto med = unpack(zip::write({{"header/med.meta", "id: x\nlanguages: en\n"}, {"parallel/en/text.txt", "Hello."}}));
  ASSERT_EQ(med.parallel.versions.size(), 1u);
  EXPECT_EQ(med.parallel.versions.at(kEn).source(), "Hello.");
  EXPECT_TRUE(med.parallel.versions.at(kEn).root().children.empty());
}

TEST(Medbox, DirectoryRoundTrip) {
  const auto dir = fs::temp_directory_path() / "partext_medbox_dir";
  fs::remove_all(dir);
  auto members = pack_members(bilingual());
  write_directory(members, dir);
  EXPECT_EQ(read_directory(dir), members);
  EXPECT_TRUE(validate_directory(dir).empty());
  EXPECT_EQ(error_of([&] { write_directory({{"../x", ""}}, dir); }), ErrorCode::InvalidDossier);
  fs::remove_all(dir);
}

TEST(Index, HeaderOnly) {
  auto html = generate_index(make_dossier("d0", "Empty & <odd>", {kEn}));
  EXPECT_NE(html.find("<table class=\"header\">"), std::string::npos);
  EXPECT_NE(html.find("Empty &amp; &lt;odd&gt;"), std::string::npos);
  EXPECT_EQ(count_matches(html, std::regex("<tr class=\"version\">")), 0u);
  EXPECT_EQ(count_matches(html, std::regex("<li>")), 0u);
}

TEST(Index, RowsAndLinks) {
  auto med = bilingual();
  auto html = generate_index(med);
  EXPECT_EQ(count_matches(html, std::regex("<tr class=\"version\">")), 2u);
  EXPECT_NE(html.find("href=\"parallel/en/text.txt\""), std::string::npos);
  EXPECT_NE(html.find("href=\"parallel/es/text.txt\""), std::string::npos);
  EXPECT_EQ(html, generate_index(med));

  const auto members = pack_members(med);
  const auto present = names(members);
  const auto& index = std::find_if(members.begin(), members.end(), [](auto& m) { return m.name == "index.html"; })->data;
  const std::regex href("href=\"([^\"]*)\"");
  for (auto it = std::sregex_iterator(index.begin(), index.end(), href); it != std::sregex_iterator(); ++it) {
    EXPECT_TRUE(present.contains((*it)[1].str())) << (*it)[1].str();
  }
}

TEST(Index, SuspendedRussian) {
  auto med = bilingual();
  med.header["languages"] = "en,es,ru";
  med.parallel = set_entirety(med.parallel, kRu, {Entirety::suspended});
  auto html = generate_index(med);
  EXPECT_EQ(count_matches(html, std::regex("<tr class=\"version\">")), 3u);
  EXPECT_TRUE(std::regex_search(html, std::regex("<td>ru</td><td>Russian</td><td>suspended</td><td>absent</td>")));
  EXPECT_TRUE(validate(pack(med)).empty());
}

TEST(Lint, CleanDossiers) {
  auto header_only = validate(pack(make_dossier("d0", "Empty", {kEn})));
  ASSERT_EQ(header_only.size(), 1u);
  EXPECT_EQ(header_only[0].code, "missing-version");
  auto explained = make_dossier("d0", "Empty", {kEn});
  explained.parallel = set_entirety(explained.parallel, kEn, {Entirety::translating});
  EXPECT_TRUE(validate(pack(explained)).empty());
  EXPECT_TRUE(validate(pack(bilingual())).empty()) << render(validate(pack(bilingual())));
}

TEST(Lint, NotAZip) {
  auto diags = validate("plain text");
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "not-a-zip");
  EXPECT_EQ(diags[0].severity, Severity::error);
}

TEST(Lint, Sorted) {
  auto members = pack_members(bilingual());
  members.push_back({"zzz.txt", ""});
  members.push_back({"aaa.txt", ""});
  auto diags = validate_members(members);
  EXPECT_TRUE(std::is_sorted(diags.begin(), diags.end(), [](const auto& a, const auto& b) {
    return std::tie(a.member, a.code) < std::tie(b.member, b.code);
  }));
  EXPECT_EQ(diags.size(), 2u);
}

// Each fixture directory is an unpacked dossier seeded with one defect class;
// expected.txt lists "severity code member" lines, sorted like the linter.
TEST(Lint, FixtureCorpus) {
  const fs::path root = fs::path(PARTEXT_FIXTURES) / "med";
  std::size_t cases = 0;
  std::set<std::string> classes;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    ++cases;
    const auto expected = read_file(entry.path() / "expected.txt");
    const auto dossier = entry.path() / "dossier";
    auto as_dir = validate_directory(dossier);
    EXPECT_EQ(render(as_dir), expected) << entry.path().filename();
    EXPECT_EQ(render(validate(zip::write(read_directory(dossier)))), expected) << entry.path().filename();
    for (const auto& d : as_dir) classes.insert(d.code);
  }
  EXPECT_GE(cases, 10u);
  EXPECT_GE(classes.size(), 10u);
}

TEST(Lint, UnsafePath) {
  auto members = pack_members(bilingual());
  members.push_back({"../escape.txt", "x"});
  auto diags = validate(zip::write(members));
  ASSERT_GE(diags.size(), 1u);
  EXPECT_EQ(diags[0].code, "unsafe-path");
  EXPECT_EQ(diags[0].member, "../escape.txt");
  EXPECT_EQ(error_of([&] { unpack_members(members); }), ErrorCode::InvalidDossier);
}
