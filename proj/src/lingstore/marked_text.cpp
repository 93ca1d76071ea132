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

// Escaping. A literal run of k '<' or k '>' is written as 2k-1 characters,
// so literal runs always have odd length, while an opener `<<` or a group
// of c closers `>>`...`>>` always has even length. Where a literal run
// would touch a marker made of the same character, a single `|` (a
// "break") separates them. A literal `|` is always written `||`, which
// keeps a lone `|` unambiguous.

#include <charconv>

#include "partext/error.hpp"
#include "partext/lingstore.hpp"
#include "partext/utf8.hpp"

namespace partext {

namespace {

constexpr std::string_view kHeader = "#base ";

std::string label_for(const Segment& seg, std::string_view base) {
  std::string label;
  switch (seg.kind) {
    case SegmentKind::paragraph:
      label = "p:";
      break;
    case SegmentKind::subsentence:
      label = "sub:";
      break;
    case SegmentKind::sentence:
      break;
    case SegmentKind::file:
      throw Error(ErrorCode::Unrepresentable, "nested file segment");
  }
  if (seg.record_uri) {
    auto [prefix, id] = split_record_uri(*seg.record_uri);
    if (prefix != base) {
      throw Error(ErrorCode::MixedBases, "record URI '" + *seg.record_uri + "' does not use base '" +
                                             std::string(base) + "'");
    }
    label += "r" + std::to_string(id);
  }
  return label;
}

class Emitter {
 public:
  Emitter(const SegmentedText& doc, std::string_view base) : src_(doc.source()), base_(base) {}

  std::string run(const Segment& root) {
    if (root.record_uri) throw Error(ErrorCode::Unrepresentable, "the file segment cannot carry a record URI");
    out_ = std::string(kHeader) + std::string(base_) + "\n";
    body(root);
    flush_closers();
    return std::move(out_);
  }

 private:
  void body(const Segment& seg) {
    std::size_t pos = seg.span.begin;
    for (const auto& child : seg.children) {
      literal(std::string_view(src_).substr(pos, child.span.begin - pos));
      open(child);
      body(child);
      ++pending_closers_;
      pos = child.span.end;
    }
    literal(std::string_view(src_).substr(pos, seg.span.end - pos));
  }

  void flush_closers() {
    if (pending_closers_ == 0) return;
    separate('>');
    out_.append(2 * pending_closers_, '>');
    pending_closers_ = 0;
  }

  void open(const Segment& seg) {
    flush_closers();
    separate('<');
    out_ += "<<";
    out_ += label_for(seg, base_);
    out_ += '|';
  }

  // A break goes between two runs of the same bracket character.
  void separate(char next) {
    if (!out_.empty() && out_.back() == next) out_ += '|';
  }

  void literal(std::string_view text) {
    if (text.empty()) return;
    flush_closers();
    std::size_t i = 0;
    while (i < text.size()) {
      const char c = text[i];
      if (c == '<' || c == '>') {
        std::size_t j = i;
        while (j < text.size() && text[j] == c) ++j;
        separate(c);
        out_.append(2 * (j - i) - 1, c);
        i = j;
      } else if (c == '|') {
        out_ += "||";
        ++i;
      } else {
        out_ += c;
        ++i;
      }
    }
  }

  const std::string& src_;
  std::string_view base_;
  std::string out_;
  std::size_t pending_closers_ = 0;
};

class MarkedParser {
 public:
  MarkedParser(std::string_view text, const LanguageTag& language) : text_(text), language_(language) {}

  SegmentedText run() {
    if (!text_.starts_with(kHeader)) fail("first line must be '#base <uri>'", 0);
    const auto nl = text_.find('\n');
    if (nl == std::string_view::npos) fail("missing newline after the base line", text_.size());
    base_ = std::string(text_.substr(kHeader.size(), nl - kHeader.size()));
    if (!base_.empty() && base_.back() == '\r') base_.pop_back();
    if (base_.empty()) fail("empty base URI", kHeader.size());
    i_ = nl + 1;

    stack_.push_back(Segment{});
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == '<' || c == '>') {
        bracket_run(c);
      } else if (c == '|') {
        const auto start = i_;
        const auto p = count_run('|');
        if (p % 2 != 0) fail("stray '|'", start);
        src_.append(p / 2, '|');
      } else {
        src_ += c;
        ++i_;
      }
    }
    if (stack_.size() > 1) fail("unterminated segment", text_.size());

    Segment root = std::move(stack_.back());
    root.kind = SegmentKind::file;
    root.span = {0, src_.size()};
    try {
      return SegmentedText(language_, std::move(src_), std::move(root));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedMarkup, std::string("invalid segment structure: ") + e.what());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t pos) {
    throw Error(ErrorCode::MalformedMarkup, what + " at byte " + std::to_string(pos), pos);
  }

  std::size_t count_run(char c) {
    const auto start = i_;
    while (i_ < text_.size() && text_[i_] == c) ++i_;
    return i_ - start;
  }

  void bracket_run(char c) {
    const auto start = i_;
    const auto r = count_run(c);
    if (r % 2 == 1) {
      src_.append((r + 1) / 2, c);
    } else if (c == '<') {
      if (r != 2) fail("'<' run of even length " + std::to_string(r), start);
      open_segment(start);
      return;
    } else {
      const auto closers = r / 2;
      if (closers > stack_.size() - 1) fail("'>>' without an open segment", start);
      for (std::size_t k = 0; k < closers; ++k) close_segment();
    }
    if (i_ < text_.size() && text_[i_] == '|') {
      const auto pipes_at = i_;
      std::size_t p = 0;
      while (i_ + p < text_.size() && text_[i_ + p] == '|') ++p;
      if (p % 2 == 1) {
        if (p != 1 || i_ + 1 >= text_.size() || text_[i_ + 1] != c) fail("stray '|'", pipes_at);
        ++i_;
      }
    }
  }

  void open_segment(std::size_t at) {
    const auto bar = text_.find('|', i_);
    if (bar == std::string_view::npos) fail("segment label without '|'", at);
    std::string_view label = text_.substr(i_, bar - i_);
    Segment seg;
    seg.kind = SegmentKind::sentence;
    if (label.starts_with("p:")) {
      seg.kind = SegmentKind::paragraph;
      label.remove_prefix(2);
    } else if (label.starts_with("sub:")) {
      seg.kind = SegmentKind::subsentence;
      label.remove_prefix(4);
    }
    if (!label.empty()) {
      RecordId id = 0;
      const char* first = label.data() + 1;
      const char* last = label.data() + label.size();
      auto [p, ec] = std::from_chars(first, last, id);
      if (label[0] != 'r' || label.size() < 2 || ec != std::errc() || p != last || id == 0) {
        fail("bad segment label '" + std::string(text_.substr(i_, bar - i_)) + "'", i_);
      }
      seg.record_uri = record_uri(base_, id);
    }
    seg.span.begin = src_.size();
    stack_.push_back(std::move(seg));
    i_ = bar + 1;
  }

  void close_segment() {
    Segment seg = std::move(stack_.back());
    stack_.pop_back();
    seg.span.end = src_.size();
    stack_.back().children.push_back(std::move(seg));
  }

  std::string_view text_;
  LanguageTag language_;
  std::string base_;
  std::string src_;
  std::size_t i_ = 0;
  std::vector<Segment> stack_;
};

bool same_structure(const Segment& a, const Segment& b) {
  if (a.kind != b.kind || a.span != b.span || a.record_uri != b.record_uri) return false;
  if (a.children.size() != b.children.size()) return false;
  for (std::size_t k = 0; k < a.children.size(); ++k) {
    if (!same_structure(a.children[k], b.children[k])) return false;
  }
  return true;
}

}  // namespace

std::string emit_marked_text(const SegmentedText& doc, std::string_view base) {
  if (base.empty() || base.find_first_of("\r\n") != std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "base URI must be a non-empty single line");
  }
  const std::string out = Emitter(doc, base).run(doc.root());

  const auto back = parse_marked_text(out, doc.language());
  if (back.source() != doc.source() || !same_structure(back.root(), doc.root())) {
    throw Error(ErrorCode::Unrepresentable, "document does not survive marked-text escaping");
  }
  return out;
}

SegmentedText parse_marked_text(std::string_view text, const LanguageTag& language) {
  if (auto bad = utf8::find_invalid(text)) throw Error(ErrorCode::InvalidEncoding, "input is not valid UTF-8", *bad);
  return MarkedParser(text, language).run();
}

}  // namespace partext
