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

#include "partext/align.hpp"
#include "partext/error.hpp"
#include "partext/utf8.hpp"
#include "support/lattice_oracle.hpp"

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

std::map<LanguageTag, SegmentedText> versions(std::initializer_list<std::pair<LanguageTag, SegmentedText>> items) {
  std::map<LanguageTag, SegmentedText> out;
  for (const auto& [k, v] : items) out.emplace(k, v);
  return out;
}

// All strictly increasing maps from [0, n) into [0, m), each listed as the
// image vector.
void monotone_pairings(std::size_t n, std::size_t m, std::vector<std::size_t>& cur,
                       std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  const std::size_t from = cur.empty() ? 0 : cur.back() + 1;
  for (std::size_t j = from; j < m; ++j) {
    cur.push_back(j);
    monotone_pairings(n, m, cur, out);
    cur.pop_back();
  }
}

}  // namespace

TEST(ParallelGranularity, Examples) {
  const TextGranularity sf{SegmentKind::sentence, Coverage::full};
  const TextGranularity sp{SegmentKind::sentence, Coverage::partial};
  const TextGranularity pf{SegmentKind::paragraph, Coverage::full};
  EXPECT_EQ(parallel_granularity({sf, sf}), sf);
  EXPECT_EQ(parallel_granularity({pf, sf}), pf);
  EXPECT_EQ(parallel_granularity({sp, sf}), sp);
}

TEST(ParallelGranularity, EqualsBruteForceMeetOnAllPairs) {
  const auto lattice = partext::testing::granularity_lattice();
  ASSERT_EQ(lattice.size(), 8u);
  int pairs = 0;
  for (const auto& a : lattice) {
    for (const auto& b : lattice) {
      EXPECT_EQ(parallel_granularity({a, b}), partext::testing::brute_force_meet(a, b));
      EXPECT_EQ(parallel_granularity({a, b}), parallel_granularity({b, a}));
      for (const auto& c : lattice) {
        EXPECT_EQ(parallel_granularity({parallel_granularity({a, b}), c}),
                  parallel_granularity({a, parallel_granularity({b, c})}));
      }
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 64);
}

TEST(Align, EqualParagraphCountsZipPositionally) {
  auto en = segment_text("One.\n\nTwo.\n\nThree.", kEn, {}, SegmentKind::paragraph);
  auto es = segment_text("Uno.\n\nDos.\n\nTres.", kEs, {}, SegmentKind::paragraph);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::paragraph);
  ASSERT_EQ(pt.groups.size(), 3u);

  const auto en_paths = segments_of_kind(en, SegmentKind::paragraph);
  const auto es_paths = segments_of_kind(es, SegmentKind::paragraph);
  std::vector<std::vector<std::size_t>> pairings;
  std::vector<std::size_t> cur;
  monotone_pairings(en_paths.size(), es_paths.size(), cur, pairings);
  ASSERT_EQ(pairings.size(), 1u);
  for (std::size_t i = 0; i < pt.groups.size(); ++i) {
    EXPECT_EQ(pt.groups[i].kind, SegmentKind::paragraph);
    EXPECT_EQ(pt.groups[i].members.at(kEn), en_paths[i]);
    EXPECT_EQ(pt.groups[i].members.at(kEs), es_paths[pairings[0][i]]);
  }
  EXPECT_EQ(member_text(pt, pt.groups[1], kEs), "Dos.");
}

TEST(Align, CoarsestVersionBoundsTheKind) {
  auto en = segment_text("One. Two.\n\nThree.", kEn, {}, SegmentKind::paragraph);
  auto es = segment_text("Uno. Dos.\n\nTres.", kEs, {}, SegmentKind::sentence);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::sentence);
  EXPECT_EQ(pt.granularity.level, SegmentKind::paragraph);
  ASSERT_EQ(pt.groups.size(), 2u);
  for (const auto& g : pt.groups) EXPECT_EQ(g.kind, SegmentKind::paragraph);
}

TEST(Align, MismatchedCountsCoarsen) {
  auto en = segment_text("One. Two.\n\nThree.", kEn);
  auto es = segment_text("Uno y dos.\n\nTres.", kEs);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::sentence);
  EXPECT_EQ(pt.granularity, (TextGranularity{SegmentKind::paragraph, Coverage::full}));
  EXPECT_EQ(pt.groups.size(), 2u);
}

TEST(Align, FileLevelFallback) {
  auto en = segment_text("One.\n\nTwo.", kEn);
  auto es = segment_text("Uno y dos.", kEs);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::sentence);
  EXPECT_EQ(pt.granularity.level, SegmentKind::file);
  ASSERT_EQ(pt.groups.size(), 1u);
  EXPECT_EQ(pt.groups[0].members.size(), 2u);
}

TEST(Align, SelfAlignment) {
  auto en = segment_text("Alpha one. Beta two!\n\nGamma three?", kEn);
  auto copy = SegmentedText(kFr, en.source(), en.root());
  auto pt = align(versions({{kEn, en}, {kFr, copy}}), SegmentKind::sentence);
  const auto count = segments_of_kind(en, SegmentKind::sentence).size();
  ASSERT_EQ(pt.groups.size(), count);
  for (const auto& g : pt.groups) {
    EXPECT_EQ(g.members.at(kEn), g.members.at(kFr));
    EXPECT_EQ(member_text(pt, g, kEn), member_text(pt, g, kFr));
  }
}

TEST(Align, SymmetricUnderPermutation) {
  auto a = segment_text("One. Two.\n\nThree.", kEn);
  auto b = segment_text("Uno. Dos.\n\nTres.", kEs);
  auto p1 = align(versions({{kEn, a}, {kEs, b}}), SegmentKind::sentence);
  auto p2 = align(versions({{kEs, SegmentedText(kEs, a.source(), a.root())}, {kEn, SegmentedText(kEn, b.source(), b.root())}}),
                  SegmentKind::sentence);
  ASSERT_EQ(p1.groups.size(), p2.groups.size());
  for (std::size_t i = 0; i < p1.groups.size(); ++i) {
    EXPECT_EQ(p1.groups[i].members.at(kEn), p2.groups[i].members.at(kEs));
    EXPECT_EQ(p1.groups[i].members.at(kEs), p2.groups[i].members.at(kEn));
  }
}

TEST(Align, NeverFinerThanInputs) {
  auto en = segment_text("One\x1E more. Two.", kEn, {}, SegmentKind::subsentence);
  auto es = segment_text("Uno. Dos.", kEs, {}, SegmentKind::subsentence);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::subsentence);
  EXPECT_LE(pt.granularity, parallel_granularity(pt.versions));
  EXPECT_EQ(pt.groups.front().kind, SegmentKind::sentence);
}

TEST(Align, Errors) {
  auto en = segment_text("One.", kEn);
  EXPECT_EQ(error_of([&] { align(versions({{kEn, en}}), SegmentKind::sentence); }), ErrorCode::InvalidArgument);
  auto e1 = segment_text("", kEn);
  auto e2 = segment_text("  \n", kEs);
  EXPECT_EQ(error_of([&] { align(versions({{kEn, e1}, {kEs, e2}}), SegmentKind::file); }),
            ErrorCode::GranularityUnachievable);
  auto p1 = segment_text("One.", kEn, {}, SegmentKind::paragraph);
  auto p2 = segment_text("Uno.", kEs, {}, SegmentKind::paragraph);
  EXPECT_EQ(error_of([&] { align(versions({{kEn, p1}, {kEs, p2}}), SegmentKind::sentence); }), ErrorCode::KindTooFine);
}

TEST(Entirety, Combinations) {
  auto pt = align(versions({{kEn, segment_text("One.", kEn)}, {kEs, segment_text("Uno.", kEs)}}), SegmentKind::sentence);
  auto fa = parse_tag("fa");
  auto et = parse_tag("et");
  auto with_fa = set_entirety(pt, fa, {Entirety::summary, Entirety::machine});
  EXPECT_EQ(with_fa.entirety.at(fa).to_string(), "summary,machine");
  auto with_et = set_entirety(with_fa, et, {Entirety::undefined});
  EXPECT_TRUE(with_et.entirety.at(et).contains(Entirety::undefined));
  EXPECT_EQ(error_of([&] { set_entirety(pt, kEs, {Entirety::complete, Entirety::partial}); }),
            ErrorCode::IllegalCombination);
  EXPECT_EQ(error_of([&] { EntiretySet({Entirety::complete, Entirety::summary}); }), ErrorCode::IllegalCombination);
  EXPECT_EQ(error_of([&] { EntiretySet({Entirety::undefined, Entirety::machine}); }), ErrorCode::IllegalCombination);
  EXPECT_EQ(error_of([&] { EntiretySet(std::set<Entirety>{}); }), ErrorCode::IllegalCombination);
  EXPECT_EQ(EntiretySet::parse("machine, summary"), (EntiretySet{Entirety::summary, Entirety::machine}));
}

TEST(SplitMultilingual, BodyAndAnnex) {
  auto st = segment_marked(
      R"(<doc xml:lang="mm"><p xml:lang="es"><s>Hola mundo.</s></p><p xml:lang="es"><s>Adiós.</s></p>)"
      R"(<div xml:lang="en"><p><s>Annex text.</s></p></div><p xml:lang="xx">12:30</p></doc>)");
  auto parts = split_multilingual(st);
  ASSERT_EQ(parts.size(), 2u);
  const auto& es = parts.at(kEs);
  const auto& en = parts.at(kEn);
  EXPECT_EQ(es.root().children.size(), 3u);
  EXPECT_EQ(en.root().children.size(), 2u);
  EXPECT_EQ(utf8::normalize_whitespace(segment_content(en, en.root())), "Annex text.12:30");
  EXPECT_EQ(segment_content(es, es.root()), "Hola mundo.Adiós.12:30");
  EXPECT_EQ(reconstruct(en), st.source());
  EXPECT_EQ(en.granularity(), (TextGranularity{SegmentKind::sentence, Coverage::partial}));
}

TEST(SplitMultilingual, MislabelledMonolingual) {
  auto st = segment_marked(R"(<doc xml:lang="mm"><p xml:lang="en">One.</p><p xml:lang="en">Two.</p></doc>)");
  auto parts = split_multilingual(st);
  ASSERT_EQ(parts.size(), 1u);
  EXPECT_EQ(parts.begin()->first, kEn);
  EXPECT_EQ(parts.begin()->second.root().children.size(), 2u);
}

TEST(SplitMultilingual, SentenceInterleavingRejected) {
  auto st = segment_marked(
      R"(<doc xml:lang="mm"><p xml:lang="es"><s>Hola.</s><s xml:lang="en">Hello.</s></p></doc>)");
  EXPECT_EQ(error_of([&] { split_multilingual(st); }), ErrorCode::VeryMixedUnsupported);
}

// A paragraph is "very mixed" exactly when some switch inside it names a
// different language.
TEST(SplitMultilingual, SwitchDepthOracle) {
  const std::vector<std::string> langs{"es", "en"};
  for (int mask = 0; mask < 16; ++mask) {
    std::string doc = R"(<doc xml:lang="mm"><p xml:lang="es">)";
    bool mixed = false;
    for (int i = 0; i < 4; ++i) {
      const auto& lang = langs[(mask >> i) & 1];
      mixed = mixed || lang != "es";
      doc += "<s xml:lang=\"" + lang + "\">Word " + std::to_string(i) + ".</s> ";
    }
    doc += "</p></doc>";
    auto st = segment_marked(doc);
    if (mixed) {
      EXPECT_EQ(error_of([&] { split_multilingual(st); }), ErrorCode::VeryMixedUnsupported) << doc;
    } else {
      EXPECT_EQ(split_multilingual(st).size(), 1u);
    }
  }
}

TEST(Consistency, Diagnostics) {
  auto en = segment_text("Alpha.\n\nBeta.\n\nAnnex.", kEn, {}, SegmentKind::paragraph);
  auto es = segment_text("Alfa.\n\nBeta.\n\nAnexo.", kEs, {}, SegmentKind::paragraph);
  auto pt = align(versions({{kEn, en}, {kEs, es}}), SegmentKind::paragraph);

  auto same = split_multilingual(segment_marked(
      R"(<doc xml:lang="mm"><p xml:lang="es">Alfa.</p><p xml:lang="en">Alpha.</p><p xml:lang="en">Beta.</p><p xml:lang="en">  Annex.</p></doc>)"));
  EXPECT_TRUE(check_multilingual_consistency(pt, same.at(kEn), kEn).empty());

  auto differ = segment_marked(R"(<doc xml:lang="en"><p>Alpha.</p><p>Bet.</p><p>Annex.</p></doc>)");
  auto diags = check_multilingual_consistency(pt, differ, kEn);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].group_index, 1u);

  auto missing = segment_marked(R"(<doc xml:lang="en"><p>Alpha.</p></doc>)");
  diags = check_multilingual_consistency(pt, missing, kEn);
  ASSERT_EQ(diags.size(), 2u);
  EXPECT_EQ(diags[0].group_index, 1u);
  EXPECT_EQ(diags[1].group_index, 2u);
}
