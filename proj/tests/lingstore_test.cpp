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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"
#include "support/fuzzy_oracle.hpp"
#include "support/random_text.hpp"

using namespace partext;

namespace {

const LanguageTag kEn = parse_tag("en");
const LanguageTag kEs = parse_tag("es");
const LanguageTag kFr = parse_tag("fr");

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

LinguisticRecord rec(std::map<LanguageTag, std::string> segments) {
  LinguisticRecord r;
  r.segments = std::move(segments);
  return r;
}

LinguisticTable reference_table() {
  LinguisticTable t("example");
  t.insert(rec({{kEn, "hello world"}, {kEs, "Hola mundo"}}));
  t.insert(rec({{kEn, "white cat"}, {kEs, "gato blanco"}}));
  t.insert(rec({{kEn, "white cat"}, {kEs, "gata blanca"}}));
  return t;
}

std::vector<RecordId> ids_of(const std::vector<LinguisticRecord>& records) {
  std::vector<RecordId> out;
  for (const auto& r : records) out.push_back(r.id);
  return out;
}

using partext::testing::oracle_fuzzy;
using partext::testing::oracle_score;

std::string small_word(partext::testing::RandomText& gen) {
  static constexpr std::array<std::string_view, 12> kWords{"cat", "cats", "hat", "white", "whine", "black",
                                                           "blank", "mundo", "mondo", "λόγος", "λόγοι", "日本"};
  return std::string(kWords[gen.uniform(0, kWords.size() - 1)]);
}

std::string small_phrase(partext::testing::RandomText& gen) {
  std::string s;
  const auto n = gen.uniform(1, 4);
  for (std::size_t k = 0; k < n; ++k) s += (k ? " " : "") + small_word(gen);
  return s;
}

LinguisticTable random_table(partext::testing::RandomText& gen, std::size_t n) {
  LinguisticTable t("random");
  for (std::size_t k = 0; k < n; ++k) {
    std::map<LanguageTag, std::string> seg{{kEn, small_phrase(gen)}};
    if (gen.uniform(0, 3) > 0) seg[kEs] = small_phrase(gen);
    if (gen.uniform(0, 3) == 0) seg[kFr] = small_phrase(gen);
    const auto id = t.insert(rec(seg));
    for (auto i = gen.uniform(0, 2); i > 0; --i) t.bump_value(id, ValueEvent::read);
    if (gen.uniform(0, 4) == 0) t.bump_value(id, ValueEvent::use);
  }
  return t;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("partext-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Table, ReferenceInsertions) {
  LinguisticTable t("example");
  EXPECT_EQ(t.insert(rec({{kEn, "hello world"}, {kEs, "Hola mundo"}})), 1u);
  EXPECT_EQ(t.insert(rec({{kEn, "hello world"}, {kEs, "Hola mundo"}})), 1u);
  EXPECT_EQ(t.insert(rec({{kEn, "white cat"}, {kEs, "gato blanco"}})), 2u);
  EXPECT_EQ(t.insert(rec({{kEn, "white cat"}, {kEs, "gata blanca"}})), 3u);
  EXPECT_EQ(t.size(), 3u);
}

TEST(Table, DedupNormalizesWhitespace) {
  LinguisticTable t;
  const auto a = t.insert(rec({{kEn, "white  cat"}}));
  EXPECT_EQ(t.insert(rec({{kEn, " white cat "}})), a);
  EXPECT_NE(t.insert(rec({{kEn, "white cat"}, {kEs, "gato"}})), a);
}

TEST(Table, RejectsInvalidRecords) {
  LinguisticTable t;
  EXPECT_EQ(error_of([&] { t.insert(rec({})); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([&] { t.insert(rec({{kEn, ""}})); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([&] { t.insert(rec({{kEn, "\xff"}})); }), ErrorCode::InvalidEncoding);
  auto r = rec({{kEn, "x"}});
  r.id = 0;
  EXPECT_EQ(error_of([&] { t.insert_with_id(r); }), ErrorCode::InvalidArgument);
  r.id = 5;
  t.insert_with_id(r);
  EXPECT_EQ(error_of([&] { t.insert_with_id(r); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(t.insert(rec({{kEn, "y"}})), 6u);
}

TEST(Lookup, ReferenceExact) {
  const auto t = reference_table();
  EXPECT_EQ(ids_of(t.lookup_exact(kEn, "white cat")), (std::vector<RecordId>{2, 3}));
  EXPECT_EQ(ids_of(t.lookup_exact(kEn, "hello world")), (std::vector<RecordId>{1}));
  EXPECT_TRUE(t.lookup_exact(kEn, "absent text").empty());
  EXPECT_EQ(ids_of(t.lookup_exact(kEn, "  white\tcat ")), (std::vector<RecordId>{2, 3}));
  EXPECT_TRUE(t.lookup_exact(kFr, "white cat").empty());
}

TEST(Lookup, ExactOrdersByValue) {
  auto t = reference_table();
  t.bump_value(3, ValueEvent::use);
  EXPECT_EQ(ids_of(t.lookup_exact(kEn, "white cat")), (std::vector<RecordId>{3, 2}));
}

TEST(Lookup, ReferenceFuzzy) {
  const auto t = reference_table();
  const auto hits = t.lookup_fuzzy(kEn, "white cats", 0.8);
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].id, 2u);
  EXPECT_EQ(hits[1].id, 3u);
  EXPECT_NEAR(hits[0].score, 1.0 - 1.0 / 10.0, 1e-12);
  EXPECT_NEAR(hits[0].score, oracle_score("white cats", "white cat"), 1e-12);
  EXPECT_TRUE(t.lookup_fuzzy(kEn, "zzz", 0.9).empty());

  const auto exact = t.lookup_fuzzy(kEn, "white cat", 1.0);
  ASSERT_EQ(exact.size(), 2u);
  for (const auto& m : exact) EXPECT_EQ(m.score, 1.0);
}

TEST(Lookup, FuzzyThresholdDomain) {
  const auto t = reference_table();
  for (double bad : {0.0, -0.1, 1.5}) {
    EXPECT_EQ(error_of([&] { (void)t.lookup_fuzzy(kEn, "x", bad); }), ErrorCode::InvalidArgument);
  }
}

TEST(Lookup, SimilarityBasics) {
  EXPECT_EQ(similarity("", ""), 1.0);
  EXPECT_EQ(similarity("abc", ""), 0.0);
  EXPECT_NEAR(similarity("kitten", "sitting"), 1.0 - 3.0 / 7.0, 1e-12);
  EXPECT_EQ(similarity("a  b", " a b"), 1.0);
  EXPECT_EQ(edit_distance(U"λόγος", U"λόγοι"), 1u);
  EXPECT_GT(bounded_edit_distance(U"abcdef", U"uvwxyz", 2), 2u);
  EXPECT_EQ(bounded_edit_distance(U"abcdef", U"abcxef", 2), 1u);
}

TEST(Lookup, FuzzyMatchesScanOracle) {
  partext::testing::RandomText gen(7);
  for (int round = 0; round < 6; ++round) {
    const auto t = random_table(gen, 150);
    for (int q = 0; q < 40; ++q) {
      const auto query = gen.uniform(0, 3) == 0 ? small_word(gen) : small_phrase(gen);
      for (double th : {0.3, 0.5, 0.65, 0.8, 0.9, 1.0}) {
        const auto got = t.lookup_fuzzy(kEn, query, th);
        const auto want = oracle_fuzzy(t, kEn, query, th);
        ASSERT_EQ(got.size(), want.size()) << query << " @ " << th;
        for (std::size_t k = 0; k < got.size(); ++k) {
          EXPECT_EQ(got[k].id, want[k].id);
          EXPECT_NEAR(got[k].score, want[k].score, 1e-9);
        }
      }
    }
  }
}

TEST(Lookup, ThresholdOneEqualsExact) {
  partext::testing::RandomText gen(11);
  const auto t = random_table(gen, 200);
  for (const auto& r : t.records()) {
    const auto& text = r.segments.at(kEn);
    std::vector<RecordId> fuzzy;
    for (const auto& m : t.lookup_fuzzy(kEn, text, 1.0)) fuzzy.push_back(m.id);
    EXPECT_EQ(fuzzy, ids_of(t.lookup_exact(kEn, text)));
  }
}

TEST(Lookup, ScoreOneIffEqual) {
  partext::testing::RandomText gen(13);
  const auto t = random_table(gen, 100);
  for (int q = 0; q < 50; ++q) {
    const auto query = small_phrase(gen);
    for (const auto& m : t.lookup_fuzzy(kEn, query, 0.3)) {
      const bool equal = utf8::normalize_whitespace(t.find(m.id)->segments.at(kEn)) == query;
      EXPECT_EQ(m.score == 1.0, equal);
    }
  }
}

TEST(Table, ExactIndexAgreesWithScan) {
  partext::testing::RandomText gen(17);
  LinguisticTable t;
  std::vector<LinguisticRecord> shadow;
  for (int k = 0; k < 1000; ++k) {
    std::map<LanguageTag, std::string> seg{{kEn, small_phrase(gen)}};
    if (gen.uniform(0, 1)) seg[kEs] = small_phrase(gen);
    t.insert(rec(seg));
    if (k % 97 == 0) {
      for (const auto& lang : {kEn, kEs}) {
        const auto q = small_phrase(gen);
        std::vector<RecordId> scan;
        for (const auto& r : t.records()) {
          auto it = r.segments.find(lang);
          if (it != r.segments.end() && utf8::normalize_whitespace(it->second) == q) scan.push_back(r.id);
        }
        auto got = ids_of(t.lookup_exact(lang, q));
        std::sort(got.begin(), got.end());
        EXPECT_EQ(got, scan);
      }
    }
  }
}

TEST(Value, Formula) {
  auto t = reference_table();
  EXPECT_EQ(t.bump_value(1, ValueEvent::use).effective(), 10.0);
  EXPECT_EQ(t.bump_value(2, ValueEvent::read).effective(), 1.0);
  EXPECT_EQ(error_of([&] { t.bump_value(999, ValueEvent::read); }), ErrorCode::NoSuchRecord);

  auto v = t.set_manual_value(2, 0.5);
  EXPECT_EQ(v.effective(), 0.5);
  EXPECT_EQ(t.bump_value(2, ValueEvent::use).effective(), 0.5);
  EXPECT_EQ(t.set_manual_value(2, std::nullopt).effective(), 11.0);
  EXPECT_EQ(error_of([&] { t.set_manual_value(2, -1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([&] { t.set_manual_value(42, 1.0); }), ErrorCode::NoSuchRecord);
}

TEST(Value, MonotoneUnderEvents) {
  partext::testing::RandomText gen(19);
  auto t = reference_table();
  double last = 0;
  for (int k = 0; k < 200; ++k) {
    const auto v = t.bump_value(1, gen.uniform(0, 1) ? ValueEvent::use : ValueEvent::read);
    EXPECT_GE(v.effective(), last);
    last = v.effective();
  }
}

TEST(Tmx, ReferenceExport) {
  const auto tmx = export_tmx(reference_table());
  std::size_t tus = 0;
  for (auto p = tmx.find("<tu "); p != std::string::npos; p = tmx.find("<tu ", p + 1)) ++tus;
  EXPECT_EQ(tus, 3u);
  EXPECT_NE(tmx.find("<tuv xml:lang=\"es\"><seg>gata blanca</seg></tuv>"), std::string::npos);
  EXPECT_EQ(export_tmx(reference_table(), {kEs}).find("xml:lang=\"en\""), std::string::npos);
}

TEST(Tmx, RoundTripKeepsSegmentsAndMetadata) {
  auto t = reference_table();
  auto r = rec({{kEn, "a < b & \"c\" > d"}, {kFr, "ligne\r\nsuivante"}});
  r.domain = "law";
  r.source_link = "http://example.com/doc?a=1&b=2";
  r.provenance = Provenance{"db", 7};
  const auto id = t.insert(r);
  t.bump_value(id, ValueEvent::use);
  t.set_manual_value(1, 2.25);
  const auto back = import_tmx(export_tmx(t));
  EXPECT_EQ(back, t);
}

TEST(Tmx, Errors) {
  const auto tmx = export_tmx(reference_table());
  const auto truncated = tmx.substr(0, tmx.size() / 2);
  try {
    import_tmx(truncated);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedTmx);
    EXPECT_TRUE(e.position().has_value());
  }
  EXPECT_EQ(error_of([] { import_tmx("<html/>"); }), ErrorCode::MalformedTmx);
  EXPECT_EQ(error_of([] { import_tmx("<tmx><body><tu><tuv xml:lang=\"en\"><seg>a</seg></tuv><tuv xml:lang=\"en-GB\">"
                                     "<seg>b</seg></tuv></tu></body></tmx>"); }),
            ErrorCode::MalformedTmx);
  try {
    import_tmx("<tmx><body><tu><tuv xml:lang=\"en\"><seg>a<bpt i=\"1\">x</bpt><ph>y</ph></seg></tuv></tu></body></tmx>");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedTmx);
    EXPECT_NE(std::string(e.what()).find("<bpt>, <ph>"), std::string::npos);
  }
  EXPECT_EQ(error_of([] { export_tmx([] {
              LinguisticTable t;
              t.insert(rec({{kEn, std::string("bell\x07")}}));
              return t;
            }()); }),
            ErrorCode::Unrepresentable);
}

TEST(Tmx, ImportAssignsFreshIdsAndSubtags) {
  const auto t = import_tmx(
      "<?xml version=\"1.0\"?><tmx version=\"1.4\"><header/><body>"
      "<tu tuid=\"40\"><note>skip</note><tuv xml:lang=\"en-US\"><seg>one</seg></tuv><tuv lang=\"es\"><seg>uno</seg></tuv></tu>"
      "<tu tuid=\"9\"><tuv xml:lang=\"en\"><seg>two</seg></tuv></tu></body></tmx>");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.find(1)->segments.at(kEn), "one");
  EXPECT_EQ(t.find(1)->segments.at(kEs), "uno");
  EXPECT_EQ(t.find(2)->segments.at(kEn), "two");
}

TEST(Csv, ReferenceExport) {
  const auto csv = export_csv(reference_table());
  EXPECT_EQ(csv, "id,en,es\n1,hello world,Hola mundo\n2,white cat,gato blanco\n3,white cat,gata blanca\n");
}

TEST(Csv, QuotingLaw) {
  LinguisticTable t;
  t.insert(rec({{kEn, "one, two"}, {kEs, "say \"hi\"\nnext"}}));
  const auto csv = export_csv(t);
  EXPECT_NE(csv.find("\"one, two\""), std::string::npos);
  EXPECT_NE(csv.find("\"say \"\"hi\"\"\nnext\""), std::string::npos);
  const auto back = import_csv(csv);
  EXPECT_EQ(back.find(1)->segments, t.find(1)->segments);
}

TEST(Csv, Errors) {
  EXPECT_EQ(error_of([] { import_csv("id,en,es\n1,hello\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\n1,\"open\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\n1,a\"b\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\n1,a\n1,b\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\n0,a\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\nx,a\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,zz\n1,a\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en,en\n1,a,b\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("id,en\n1,\n"); }), ErrorCode::MalformedCsv);
  EXPECT_EQ(error_of([] { import_csv("lang,en\n1,a\n"); }), ErrorCode::MalformedCsv);
}

TEST(Csv, ExplicitHeaderAndCrlf) {
  const auto t = import_csv("4,four,cuatro\r\n9,nine,\r\n", std::vector<std::string>{"id", "en", "es"});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.find(4)->segments.at(kEs), "cuatro");
  EXPECT_FALSE(t.find(9)->segments.contains(kEs));
}

TEST(RoundTrip, RandomTmxAndCsv) {
  partext::testing::RandomText gen(23);
  for (int round = 0; round < 50; ++round) {
    LinguisticTable t("rt");
    const auto n = gen.uniform(0, 30);
    for (std::size_t k = 0; k < n; ++k) {
      std::map<LanguageTag, std::string> seg;
      for (const auto& lang : {kEn, kEs, kFr}) {
        if (gen.uniform(0, 2) == 0) continue;
        auto s = gen.text(80);
        std::erase(s, '\x1E');
        if (!utf8::normalize_whitespace(s).empty()) seg[lang] = s;
      }
      if (!seg.empty()) t.insert(rec(seg));
    }
    std::vector<std::map<LanguageTag, std::string>> want;
    for (const auto& r : t.records()) want.push_back(r.segments);

    const auto tmx_back = import_tmx(export_tmx(t));
    std::vector<std::map<LanguageTag, std::string>> got;
    for (const auto& r : tmx_back.records()) got.push_back(r.segments);
    EXPECT_EQ(got, want);

    const auto csv_back = import_csv(export_csv(t));
    EXPECT_EQ(csv_back.size(), t.size());
    for (const auto& r : t.records()) EXPECT_EQ(csv_back.find(r.id)->segments, r.segments);
  }
}

TEST(RecordUri, Resolve) {
  TableRegistry registry{{"http://example.com", std::make_shared<LinguisticTable>(reference_table())}};
  EXPECT_EQ(resolve_record_uri("http://example.com/r1", registry).segments.at(kEn), "hello world");
  EXPECT_EQ(error_of([&] { resolve_record_uri("http://example.com/r999", registry); }), ErrorCode::NoSuchRecord);
  EXPECT_EQ(error_of([&] { resolve_record_uri("http://example.com/x1", registry); }), ErrorCode::MalformedRecordUri);
  EXPECT_EQ(error_of([&] { resolve_record_uri("http://example.com/r0", registry); }), ErrorCode::MalformedRecordUri);
  EXPECT_EQ(error_of([&] { resolve_record_uri("r1", registry); }), ErrorCode::MalformedRecordUri);
  EXPECT_EQ(error_of([&] { resolve_record_uri("http://other.org/r1", registry); }), ErrorCode::UnknownBase);
  EXPECT_EQ(record_uri("http://example.com", 12), "http://example.com/r12");
  EXPECT_EQ(split_record_uri("http://example.com/a/r12"), (std::pair<std::string, RecordId>{"http://example.com/a", 12}));
}

TEST(MarkedText, SingleSegment) {
  const auto doc = with_record_uri(segment_text("hello world", kEn), {0}, "http://example.com/r1");
  const auto text = emit_marked_text(doc, "http://example.com");
  EXPECT_EQ(text, "#base http://example.com\n<<p:r1|hello world>>");
  const auto back = parse_marked_text(text, kEn);
  EXPECT_EQ(back.source(), "hello world");
  EXPECT_EQ(segment_at(back, {0}).record_uri, "http://example.com/r1");
}

TEST(MarkedText, Escaping) {
  Segment sentence;
  sentence.kind = SegmentKind::sentence;
  sentence.span = {0, 9};
  Segment root;
  root.span = {0, 9};
  root.children.push_back(sentence);
  SegmentedText doc(kEn, "a<<b||c>>", root);
  const auto text = emit_marked_text(doc, "base:x");
  EXPECT_EQ(text, "#base base:x\n<<|a<<<b||||c>>>|>>");
  EXPECT_EQ(parse_marked_text(text, kEn).source(), "a<<b||c>>");
}

TEST(MarkedText, Errors) {
  auto doc = segment_text("One. Two.", kEn);
  doc = with_record_uri(doc, {0, 0}, "http://a.org/r1");
  doc = with_record_uri(doc, {0, 1}, "http://b.org/r2");
  EXPECT_EQ(error_of([&] { emit_marked_text(doc, "http://a.org"); }), ErrorCode::MixedBases);
  auto bad = with_record_uri(segment_text("One.", kEn), {0, 0}, "http://a.org/seg1");
  EXPECT_EQ(error_of([&] { emit_marked_text(bad, "http://a.org"); }), ErrorCode::MalformedRecordUri);

  for (std::string_view text : {"no header", "#base x\n<<|open", "#base x\nclose>>", "#base x\n<<q1|x>>",
                                "#base x\na|b", "#base x\n<<<<|x>>", "#base x\n<<|<<|x>>>>"}) {
    EXPECT_EQ(error_of([&] { parse_marked_text(text); }), ErrorCode::MalformedMarkup) << text;
  }
}

TEST(MarkedText, RandomRoundTrip) {
  partext::testing::RandomText gen(29);
  static constexpr std::array<std::string_view, 6> kBrackets{"<", ">", "|", "<<", ">>", "||"};
  for (int round = 0; round < 300; ++round) {
    std::string text = gen.text(400);
    for (auto k = gen.uniform(0, 8); k > 0; --k) {
      text.insert(gen.uniform(0, text.size()) == text.size() ? text.size() : 0,
                  kBrackets[gen.uniform(0, kBrackets.size() - 1)]);
    }
    const auto target = static_cast<SegmentKind>(gen.uniform(1, 3));
    auto doc = segment_text(text, kEn, {}, target);
    for (const auto& path : leaf_segments(doc)) {
      if (path.empty() || gen.uniform(0, 2) == 0) continue;
      doc = with_record_uri(doc, path, record_uri("http://example.com", gen.uniform(1, 500)));
    }
    std::string marked;
    ASSERT_NO_THROW(marked = emit_marked_text(doc, "http://example.com")) << text;
    const auto back = parse_marked_text(marked, kEn);
    EXPECT_EQ(back.source(), doc.source());
    std::function<void(const Segment&, const Segment&)> same = [&](const Segment& a, const Segment& b) {
      EXPECT_EQ(a.kind, b.kind);
      EXPECT_EQ(a.span, b.span);
      EXPECT_EQ(a.record_uri, b.record_uri);
      ASSERT_EQ(a.children.size(), b.children.size());
      for (std::size_t k = 0; k < a.children.size(); ++k) same(a.children[k], b.children[k]);
    };
    same(back.root(), doc.root());
  }
}

TEST(Extract, ReferenceExamples) {
  const auto db = reference_table();
  const auto one = extract_tm(db, segment_text("hello world", kEn), {kEs}, 1.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.name(), "example");
  EXPECT_EQ(one.find(1)->provenance, (Provenance{"example", 1}));

  EXPECT_TRUE(extract_tm(db, segment_text("", kEn), {kEs}, 1.0).empty());

  const auto two = extract_tm(db, segment_text("I saw it.\n\nwhite cat", kEn), {kEs}, 1.0);
  EXPECT_EQ(two.size(), 2u);
  EXPECT_TRUE(two.contains(2));
  EXPECT_TRUE(two.contains(3));

  EXPECT_EQ(extract_tm(db, segment_text("white cats", kEn), {kEs}, 0.8).size(), 2u);
  EXPECT_TRUE(extract_tm(db, segment_text("white cat", kEn), {kFr}, 1.0).empty());
}

TEST(Extract, KeepsOnlySourceAndTargets) {
  LinguisticTable db("db");
  db.insert(rec({{kEn, "cat"}, {kEs, "gato"}, {kFr, "chat"}}));
  const auto tm = extract_tm(db, segment_text("cat", kEn), {kFr}, 1.0);
  ASSERT_EQ(tm.size(), 1u);
  EXPECT_EQ(tm.find(1)->segments, (std::map<LanguageTag, std::string>{{kEn, "cat"}, {kFr, "chat"}}));
}

TEST(Harvest, CountsAndIdempotence) {
  std::map<LanguageTag, SegmentedText> v{{kEn, segment_text("One. Two. Three.", kEn)},
                                         {kEs, segment_text("Uno. Dos. Tres.", kEs)}};
  const auto pt = align(v, SegmentKind::sentence, "file:///doc");
  LinguisticTable t;
  EXPECT_EQ(harvest(pt, t), pt.groups.size());
  EXPECT_EQ(harvest(pt, t), 0u);
  EXPECT_EQ(t.find(1)->segments.at(kEs), "Uno.");
  EXPECT_EQ(t.find(1)->source_link, "file:///doc#g0");

  auto broken = pt;
  broken.groups[1].members.erase(kEs);
  LinguisticTable t2;
  EXPECT_EQ(harvest(broken, t2), 2u);
}

TEST(Persistence, RoundTripAcrossShards) {
  const auto dir = temp_dir("persist");
  LinguisticTable t("big");
  for (int k = 0; k < 23000; ++k) {
    t.insert(rec({{kEn, "row " + std::to_string(k)}, {kEs, "fila, " + std::to_string(k)}}));
  }
  auto meta = rec({{kFr, "ligne \"spéciale\"\nsuite"}});
  meta.domain = "law";
  meta.provenance = Provenance{"src", 3};
  meta.value.manual_override = 0.125;
  t.insert(meta);
  save_table(t, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "shard-00002.csv"));
  EXPECT_EQ(load_table(dir), t);

  LinguisticTable small("small");
  small.insert(rec({{kEn, "only"}}));
  save_table(small, dir);
  EXPECT_FALSE(std::filesystem::exists(dir / "shard-00001.csv"));
  EXPECT_EQ(load_table(dir), small);

  save_table(LinguisticTable("empty"), dir);
  EXPECT_EQ(load_table(dir), LinguisticTable("empty"));
  std::filesystem::remove_all(dir);
  EXPECT_EQ(error_of([&] { load_table(dir); }), ErrorCode::Io);
}

TEST(Concurrency, ReadersAndWriter) {
  auto t = reference_table();
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 4; ++r) {
    readers.emplace_back([&] {
      while (!stop) {
        if (t.lookup_exact(kEn, "white cat").size() != 2) ++bad;
        if (t.lookup_fuzzy(kEn, "hello wrld", 0.8).empty()) ++bad;
      }
    });
  }
  for (int k = 0; k < 2000; ++k) {
    t.insert(rec({{kEn, "filler " + std::to_string(k)}}));
    t.bump_value(1, ValueEvent::read);
  }
  stop = true;
  for (auto& th : readers) th.join();
  EXPECT_EQ(bad.load(), 0);
  EXPECT_EQ(t.size(), 2003u);
}
