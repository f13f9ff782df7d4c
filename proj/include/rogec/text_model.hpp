#pragma once

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rogec/error.hpp"
#include "rogec/unicode.hpp"

namespace rogec {

/// The 17 Universal Dependencies part-of-speech tags.
enum class UPos {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::array<std::string_view, 17> kUPosNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

constexpr std::string_view to_string(UPos tag) { return kUPosNames[static_cast<std::size_t>(tag)]; }

constexpr std::optional<UPos> parse_upos(std::string_view name) {
  for (std::size_t i = 0; i < kUPosNames.size(); ++i)
    if (kUPosNames[i] == name) return static_cast<UPos>(i);
  return std::nullopt;
}

struct Token {
  std::string form;
  std::optional<std::string> lemma;
  std::optional<UPos> upos;

  Token() = default;
  Token(std::string f, std::optional<std::string> l = std::nullopt,
        std::optional<UPos> p = std::nullopt)
      : form(std::move(f)), lemma(std::move(l)), upos(p) {}

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<std::string> source_id;

  Sentence() = default;
  explicit Sentence(std::vector<Token> toks, std::optional<std::string> id = std::nullopt)
      : tokens(std::move(toks)), source_id(std::move(id)) {}

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const Token& operator[](std::size_t i) const { return tokens[i]; }
  Token& operator[](std::size_t i) { return tokens[i]; }

  std::vector<std::string> forms() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.form);
    return out;
  }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Builds an unannotated sentence from already-split forms.
inline Sentence make_sentence(const std::vector<std::string>& forms) {
  Sentence s;
  s.tokens.reserve(forms.size());
  for (const auto& f : forms) s.tokens.emplace_back(f);
  return s;
}

/// Splits on Unicode whitespace only.
inline std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::u32string cur;
  for (char32_t c : unicode::decode(text)) {
    if (unicode::is_whitespace(c)) {
      if (!cur.empty()) out.push_back(unicode::encode(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(unicode::encode(cur));
  return out;
}

/// Whitespace split, then every leading and trailing punctuation character
/// becomes its own token. Inner punctuation stays, so hyphenated clitics such
/// as "să-l" or "într-un" remain single tokens.
inline Sentence tokenize(std::string_view text) {
  Sentence s;
  for (const auto& chunk : split_whitespace(text)) {
    std::u32string w = unicode::decode(chunk);
    std::size_t b = 0, e = w.size();
    while (b < e && unicode::is_punct(w[b])) ++b;
    if (b == e) {
      for (char32_t c : w) s.tokens.emplace_back(unicode::encode(std::u32string(1, c)));
      continue;
    }
    while (e > b && unicode::is_punct(w[e - 1])) --e;
    for (std::size_t i = 0; i < b; ++i) s.tokens.emplace_back(unicode::encode(std::u32string(1, w[i])));
    s.tokens.emplace_back(unicode::encode(std::u32string_view(w).substr(b, e - b)));
    for (std::size_t i = e; i < w.size(); ++i)
      s.tokens.emplace_back(unicode::encode(std::u32string(1, w[i])));
  }
  if (s.empty()) throw EmptyInput();
  return s;
}

/// Like tokenize, but blank text yields an empty sentence instead of an error.
inline Sentence tokenize_or_empty(std::string_view text) {
  return split_whitespace(text).empty() ? Sentence{} : tokenize(text);
}

/// Forms joined by single spaces. Lossy with respect to original spacing
/// around punctuation.
inline std::string render(const Sentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out.push_back(' ');
    out += s[i].form;
  }
  return out;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find('\t', start);
    cols.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cols;
}

}  // namespace detail

/// Reads CoNLL-U. Multiword-token ranges ("3-4") and empty nodes ("3.1") are
/// skipped; FORM, LEMMA and UPOS are kept, with "_" meaning absent.
inline std::vector<Sentence> parse_conllu(std::istream& in) {
  std::vector<Sentence> out;
  Sentence cur;
  std::optional<std::string> sent_id;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!cur.empty()) {
      cur.source_id = sent_id;
      out.push_back(std::move(cur));
    }
    cur = Sentence{};
    sent_id.reset();
  };
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      constexpr std::string_view kSentId = "# sent_id = ";
      if (line.starts_with(kSentId)) sent_id = line.substr(kSentId.size());
      continue;
    }
    auto cols = detail::split_tabs(line);
    if (cols.size() != 10) throw MalformedLine(line_no);
    std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) continue;
    std::string_view form = cols[1];
    if (!unicode::is_valid(form)) throw MalformedLine(line_no, "invalid UTF-8");
    if (form.empty() || unicode::contains_whitespace(form))
      throw MalformedLine(line_no, "empty or whitespace-bearing FORM");
    Token tok{std::string(form)};
    if (cols[2] != "_" && !cols[2].empty()) tok.lemma = std::string(cols[2]);
    if (cols[3] != "_") {
      auto tag = parse_upos(cols[3]);
      if (!tag) throw UnknownTag(line_no);
      tok.upos = *tag;
    }
    cur.tokens.push_back(std::move(tok));
  }
  flush();
  return out;
}

/// Writes sentences as minimal CoNLL-U (unfilled columns are "_").
inline void write_conllu(std::ostream& out, const std::vector<Sentence>& sentences) {
  for (const auto& s : sentences) {
    if (s.source_id) out << "# sent_id = " << *s.source_id << '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& t = s[i];
      out << (i + 1) << '\t' << t.form << '\t' << t.lemma.value_or("_") << '\t'
          << (t.upos ? to_string(*t.upos) : std::string_view("_")) << "\t_\t_\t_\t_\t_\t_\n";
    }
    out << '\n';
  }
}

}  // namespace rogec
