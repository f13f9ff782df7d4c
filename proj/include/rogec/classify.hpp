#pragma once

// Rule-based Romanian ERRANT classifier.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rogec/align.hpp"
#include "rogec/error.hpp"
#include "rogec/error_type.hpp"
#include "rogec/string_distance.hpp"
#include "rogec/text_model.hpp"
#include "rogec/unicode.hpp"

namespace rogec {

/// Dictionary word list. Words are stored lowercased (diacritics kept) and
/// lookups are case-insensitive. Immutable once built.
class Lexicon {
 public:
  Lexicon() = default;

  explicit Lexicon(const std::vector<std::string>& words) {
    std::map<std::string, std::uint64_t> merged;
    for (const auto& w : words)
      if (!w.empty()) merged.emplace(unicode::to_lower(w), 0);
    build(merged);
  }

  explicit Lexicon(const std::map<std::string, std::uint64_t>& counts) {
    std::map<std::string, std::uint64_t> merged;
    for (const auto& [w, f] : counts) {
      if (w.empty()) continue;
      auto& slot = merged[unicode::to_lower(w)];
      slot = std::max(slot, f);
    }
    build(merged);
  }

  bool contains(std::string_view word) const { return index_.count(unicode::to_lower(word)) > 0; }

  std::uint64_t frequency(std::string_view word) const {
    auto it = index_.find(unicode::to_lower(word));
    return it == index_.end() ? 0 : freqs_[it->second];
  }

  /// Words in code-point order.
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

 private:
  void build(const std::map<std::string, std::uint64_t>& merged) {
    if (merged.empty()) throw EmptyLexicon();
    for (const auto& [w, f] : merged) {
      index_.emplace(w, words_.size());
      words_.push_back(w);
      freqs_.push_back(f);
    }
  }

  std::vector<std::string> words_;
  std::vector<std::uint64_t> freqs_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reads "word" or "word<TAB>frequency" lines. Blank lines are ignored.
inline Lexicon load_lexicon(std::istream& in) {
  std::map<std::string, std::uint64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    std::string word = line.substr(0, tab);
    std::uint64_t freq = 0;
    if (tab != std::string::npos) {
      try {
        freq = std::stoull(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw LineError("bad lexicon frequency", line_no);
      }
    }
    if (!unicode::is_valid(word)) throw LineError("invalid UTF-8 in lexicon", line_no);
    if (word.empty()) continue;
    auto& slot = counts[word];
    slot = std::max(slot, freq);
  }
  return Lexicon(counts);
}

/// Longest common character subsequence over the longer length.
inline double char_overlap_ratio(std::string_view a, std::string_view b) {
  auto ua = unicode::decode(a), ub = unicode::decode(b);
  std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return static_cast<double>(lcs_length<char32_t>(ua, ub)) / static_cast<double>(longest);
}

namespace detail {

inline std::vector<const Token*> span_tokens(const Sentence& s, Span span) {
  std::vector<const Token*> out;
  for (std::size_t k = span.begin; k < span.end; ++k) out.push_back(&s[k]);
  return out;
}

inline std::vector<std::string> lower_forms(const std::vector<const Token*>& toks) {
  std::vector<std::string> out;
  for (const auto* t : toks) out.push_back(unicode::to_lower(t->form));
  return out;
}

inline std::u32string stripped_lower(const std::vector<const Token*>& toks) {
  std::u32string out;
  for (const auto* t : toks)
    for (char32_t c : unicode::decode(t->form))
      if (!unicode::is_whitespace(c)) out.push_back(unicode::to_lower(c));
  return out;
}

inline UPos fold_tag(UPos t) { return t == UPos::PROPN ? UPos::NOUN : t; }

}  // namespace detail

/// Assigns exactly one error type. Rules are tried in order and the first
/// match wins: ORDER, ORTH, SPELL, MORPH, POS:T:FORM, POS:T, OTHER.
/// Throws MissingAnnotations when a rule past SPELL needs a lemma or UPOS
/// that the decisive tokens lack.
inline ErrorType classify_edit(const Edit& e, const Sentence& orig, const Sentence& corr, const Lexicon& lex) {
  if (e.o_span.end > orig.size() || e.c_span.end > corr.size()) throw SpanOutOfBounds();
  auto o = detail::span_tokens(orig, e.o_span);
  auto c = detail::span_tokens(corr, e.c_span);

  if (!o.empty() && !c.empty()) {
    auto ol = detail::lower_forms(o), cl = detail::lower_forms(c);
    if (ol != cl) {
      auto os = ol, cs = cl;
      std::sort(os.begin(), os.end());
      std::sort(cs.begin(), cs.end());
      if (os == cs) return ErrorType::order();
    }
  }

  if (detail::stripped_lower(o) == detail::stripped_lower(c)) return ErrorType::orth();

  const bool single = o.size() == 1 && c.size() == 1;
  if (single && !lex.contains(o[0]->form) &&
      char_overlap_ratio(unicode::to_lower(o[0]->form), unicode::to_lower(c[0]->form)) > 0.5)
    return ErrorType::spell();

  if (single) {
    const Token& a = *o[0];
    const Token& b = *c[0];
    if (!a.lemma || !b.lemma || !a.upos || !b.upos) throw MissingAnnotations();
    const UPos ta = detail::fold_tag(*a.upos), tb = detail::fold_tag(*b.upos);
    if (unicode::to_lower(*a.lemma) == unicode::to_lower(*b.lemma)) {
      if (ta != tb) return ErrorType::morph();
      if (auto t = pos_category_tag(ta)) return ErrorType::pos_form(*t);
    }
  }

  std::optional<UPos> shared;
  bool uniform = true;
  for (const auto* side : {&o, &c}) {
    for (const auto* t : *side) {
      if (!t->upos) throw MissingAnnotations();
      UPos tag = detail::fold_tag(*t->upos);
      if (!shared) shared = tag;
      else if (*shared != tag) uniform = false;
    }
  }
  if (uniform && shared) {
    if (auto t = pos_category_tag(*shared)) return ErrorType::pos_of(*t);
  }
  return ErrorType::other();
}

/// Extracts and classifies the edits of every pair. A MissingAnnotations
/// error is re-thrown carrying the index of the offending pair.
inline std::vector<std::vector<Edit>> classify_all(const std::vector<std::pair<Sentence, Sentence>>& pairs,
                                                   const Lexicon& lex, const CostParams& costs = {}) {
  std::vector<std::vector<Edit>> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [orig, corr] = pairs[i];
    auto edits = extract_edits(orig, corr, costs);
    for (auto& e : edits) {
      try {
        e.etype = classify_edit(e, orig, corr, lex);
      } catch (const MissingAnnotations&) {
        throw MissingAnnotations(i);
      }
    }
    out.push_back(std::move(edits));
  }
  return out;
}

}  // namespace rogec
