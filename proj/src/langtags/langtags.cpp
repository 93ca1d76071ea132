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

#include "partext/langtags.hpp"

#include <algorithm>
#include <array>

#include "partext/error.hpp"

namespace partext {

namespace {

struct Iso639Entry {
  std::string_view code;
  std::string_view name;
};

// ISO 639-1 snapshot, sorted by code.
constexpr std::array<Iso639Entry, 184> kIso639_1{{
    {"aa", "Afar"}, {"ab", "Abkhazian"}, {"ae", "Avestan"}, {"af", "Afrikaans"},
    {"ak", "Akan"}, {"am", "Amharic"}, {"an", "Aragonese"}, {"ar", "Arabic"},
    {"as", "Assamese"}, {"av", "Avaric"}, {"ay", "Aymara"}, {"az", "Azerbaijani"},
    {"ba", "Bashkir"}, {"be", "Belarusian"}, {"bg", "Bulgarian"}, {"bh", "Bihari languages"},
    {"bi", "Bislama"}, {"bm", "Bambara"}, {"bn", "Bengali"}, {"bo", "Tibetan"},
    {"br", "Breton"}, {"bs", "Bosnian"}, {"ca", "Catalan"}, {"ce", "Chechen"},
    {"ch", "Chamorro"}, {"co", "Corsican"}, {"cr", "Cree"}, {"cs", "Czech"},
    {"cu", "Church Slavic"}, {"cv", "Chuvash"}, {"cy", "Welsh"}, {"da", "Danish"},
    {"de", "German"}, {"dv", "Divehi"}, {"dz", "Dzongkha"}, {"ee", "Ewe"},
    {"el", "Greek"}, {"en", "English"}, {"eo", "Esperanto"}, {"es", "Spanish"},
    {"et", "Estonian"}, {"eu", "Basque"}, {"fa", "Persian"}, {"ff", "Fulah"},
    {"fi", "Finnish"}, {"fj", "Fijian"}, {"fo", "Faroese"}, {"fr", "French"},
    {"fy", "Western Frisian"}, {"ga", "Irish"}, {"gd", "Gaelic"}, {"gl", "Galician"},
    {"gn", "Guarani"}, {"gu", "Gujarati"}, {"gv", "Manx"}, {"ha", "Hausa"},
    {"he", "Hebrew"}, {"hi", "Hindi"}, {"ho", "Hiri Motu"}, {"hr", "Croatian"},
    {"ht", "Haitian"}, {"hu", "Hungarian"}, {"hy", "Armenian"}, {"hz", "Herero"},
    {"ia", "Interlingua"}, {"id", "Indonesian"}, {"ie", "Interlingue"}, {"ig", "Igbo"},
    {"ii", "Sichuan Yi"}, {"ik", "Inupiaq"}, {"io", "Ido"}, {"is", "Icelandic"},
    {"it", "Italian"}, {"iu", "Inuktitut"}, {"ja", "Japanese"}, {"jv", "Javanese"},
    {"ka", "Georgian"}, {"kg", "Kongo"}, {"ki", "Kikuyu"}, {"kj", "Kuanyama"},
    {"kk", "Kazakh"}, {"kl", "Kalaallisut"}, {"km", "Central Khmer"}, {"kn", "Kannada"},
    {"ko", "Korean"}, {"kr", "Kanuri"}, {"ks", "Kashmiri"}, {"ku", "Kurdish"},
    {"kv", "Komi"}, {"kw", "Cornish"}, {"ky", "Kirghiz"}, {"la", "Latin"},
    {"lb", "Luxembourgish"}, {"lg", "Ganda"}, {"li", "Limburgan"}, {"ln", "Lingala"},
    {"lo", "Lao"}, {"lt", "Lithuanian"}, {"lu", "Luba-Katanga"}, {"lv", "Latvian"},
    {"mg", "Malagasy"}, {"mh", "Marshallese"}, {"mi", "Maori"}, {"mk", "Macedonian"},
    {"ml", "Malayalam"}, {"mn", "Mongolian"}, {"mr", "Marathi"}, {"ms", "Malay"},
    {"mt", "Maltese"}, {"my", "Burmese"}, {"na", "Nauru"}, {"nb", "Norwegian Bokmal"},
    {"nd", "North Ndebele"}, {"ne", "Nepali"}, {"ng", "Ndonga"}, {"nl", "Dutch"},
    {"nn", "Norwegian Nynorsk"}, {"no", "Norwegian"}, {"nr", "South Ndebele"}, {"nv", "Navajo"},
    {"ny", "Chichewa"}, {"oc", "Occitan"}, {"oj", "Ojibwa"}, {"om", "Oromo"},
    {"or", "Oriya"}, {"os", "Ossetian"}, {"pa", "Panjabi"}, {"pi", "Pali"},
    {"pl", "Polish"}, {"ps", "Pashto"}, {"pt", "Portuguese"}, {"qu", "Quechua"},
    {"rm", "Romansh"}, {"rn", "Rundi"}, {"ro", "Romanian"}, {"ru", "Russian"},
    {"rw", "Kinyarwanda"}, {"sa", "Sanskrit"}, {"sc", "Sardinian"}, {"sd", "Sindhi"},
    {"se", "Northern Sami"}, {"sg", "Sango"}, {"si", "Sinhala"}, {"sk", "Slovak"},
    {"sl", "Slovenian"}, {"sm", "Samoan"}, {"sn", "Shona"}, {"so", "Somali"},
    {"sq", "Albanian"}, {"sr", "Serbian"}, {"ss", "Swati"}, {"st", "Southern Sotho"},
    {"su", "Sundanese"}, {"sv", "Swedish"}, {"sw", "Swahili"}, {"ta", "Tamil"},
    {"te", "Telugu"}, {"tg", "Tajik"}, {"th", "Thai"}, {"ti", "Tigrinya"},
    {"tk", "Turkmen"}, {"tl", "Tagalog"}, {"tn", "Tswana"}, {"to", "Tonga"},
    {"tr", "Turkish"}, {"ts", "Tsonga"}, {"tt", "Tatar"}, {"tw", "Twi"},
    {"ty", "Tahitian"}, {"ug", "Uighur"}, {"uk", "Ukrainian"}, {"ur", "Urdu"},
    {"uz", "Uzbek"}, {"ve", "Venda"}, {"vi", "Vietnamese"}, {"vo", "Volapuk"},
    {"wa", "Walloon"}, {"wo", "Wolof"}, {"xh", "Xhosa"}, {"yi", "Yiddish"},
    {"yo", "Yoruba"}, {"za", "Zhuang"}, {"zh", "Chinese"}, {"zu", "Zulu"},
}};
static_assert(kIso639_1.back().code == "zu");

const std::array<std::string_view, kIso639_1.size()>& code_list() {
  static const auto codes = [] {
    std::array<std::string_view, kIso639_1.size()> out{};
    std::transform(kIso639_1.begin(), kIso639_1.end(), out.begin(),
                   [](const Iso639Entry& e) { return e.code; });
    return out;
  }();
  return codes;
}

const Iso639Entry* find_iso(std::string_view code) {
  auto it = std::lower_bound(kIso639_1.begin(), kIso639_1.end(), code,
                             [](const Iso639Entry& e, std::string_view c) { return e.code < c; });
  if (it != kIso639_1.end() && it->code == code) return &*it;
  return nullptr;
}

std::optional<TagKind> extension_kind(std::string_view code) {
  if (code == "mm") return TagKind::multilingual;
  if (code == "un") return TagKind::undetermined;
  if (code == "xx") return TagKind::no_linguistic_content;
  return std::nullopt;
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

std::string_view to_string(TagKind kind) noexcept {
  switch (kind) {
    case TagKind::standard: return "standard";
    case TagKind::multilingual: return "multilingual";
    case TagKind::undetermined: return "undetermined";
    case TagKind::no_linguistic_content: return "no-linguistic-content";
  }
  return "standard";
}

LanguageTag LanguageTag::from_valid_code(std::string_view code) {
  return LanguageTag(std::string(code), extension_kind(code).value_or(TagKind::standard));
}

LanguageTag parse_tag(std::string_view raw) {
  if (raw.size() != 2 || !is_ascii_alpha(raw[0]) || !is_ascii_alpha(raw[1])) {
    throw Error(ErrorCode::Malformed,
                "language label '" + std::string(raw) + "' is not two ASCII letters");
  }
  std::string code{static_cast<char>(raw[0] | 0x20), static_cast<char>(raw[1] | 0x20)};
  if (extension_kind(code)) return LanguageTag::from_valid_code(code);
  if (!find_iso(code)) {
    throw Error(ErrorCode::UnknownCode, "unknown language code '" + code + "'");
  }
  return LanguageTag::from_valid_code(code);
}

std::optional<LanguageTag> try_parse_tag(std::string_view raw) {
  try {
    return parse_tag(raw);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<LanguageTag> parse_tag_list(std::string_view raw) {
  std::vector<LanguageTag> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find(',', start);
    if (end == std::string_view::npos) end = raw.size();
    auto item = raw.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      auto tag = parse_tag(item);
      if (std::find(out.begin(), out.end(), tag) == out.end()) out.push_back(std::move(tag));
    }
    start = end + 1;
  }
  return out;
}

std::string_view language_name(const LanguageTag& tag) {
  const auto* entry = find_iso(tag.code());
  return entry ? entry->name : std::string_view{};
}

std::size_t iso639_1_size() noexcept { return kIso639_1.size(); }

std::span<const std::string_view> iso639_1_codes() noexcept { return code_list(); }

FileLanguageMetadata FileLanguageMetadata::undetermined() {
  return FileLanguageMetadata{{LanguageTag::from_valid_code("un")}, std::nullopt};
}

bool FileLanguageMetadata::is_valid() const {
  if (declared.empty()) return false;
  std::set<LanguageTag> unique(declared.begin(), declared.end());
  if (unique.size() != declared.size()) return false;
  auto un = LanguageTag::from_valid_code("un");
  return !unique.contains(un) || unique.size() == 1;
}

std::vector<LabellingDiagnostic> check_labelling(const FileLanguageMetadata& meta,
                                                 const std::set<LanguageTag>& observed) {
  std::vector<LabellingDiagnostic> out;

  std::set<LanguageTag> content;
  for (const auto& tag : observed) {
    if (tag.is_standard()) content.insert(tag);
  }
  const auto ml = LanguageTag::from_valid_code("ml");
  const bool declares_ml =
      std::find(meta.declared.begin(), meta.declared.end(), ml) != meta.declared.end();
  const bool ml_misused = declares_ml && content.size() > 1;

  if (ml_misused) {
    out.push_back({LabellingIssue::malayalam_misuse, ml,
                   "code 'ml' is reserved for Malayalam; label multilingual content with 'mm'"});
  }

  std::set<LanguageTag> declared_standard;
  for (const auto& tag : meta.declared) {
    switch (tag.kind()) {
      case TagKind::standard:
        if (ml_misused && tag == ml) break;
        declared_standard.insert(tag);
        if (!content.contains(tag)) {
          out.push_back({LabellingIssue::declared_but_absent, tag,
                         "declared language '" + tag.code() + "' not found in content"});
        }
        break;
      case TagKind::multilingual:
        if (content.size() < 2) {
          out.push_back({LabellingIssue::declared_but_absent, tag,
                         "file labelled 'mm' but content holds fewer than two languages"});
        }
        break;
      case TagKind::undetermined:
      case TagKind::no_linguistic_content:
        break;
    }
  }

  if (!ml_misused) {
    for (const auto& tag : content) {
      if (!declared_standard.contains(tag)) {
        out.push_back({LabellingIssue::undeclared_language, tag,
                       "content in '" + tag.code() + "' is not declared"});
      }
    }
  }
  return out;
}

}  // namespace partext
