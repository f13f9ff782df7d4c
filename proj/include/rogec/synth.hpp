#pragma once

// Corpus filtering and synthetic error injection.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rogec/classify.hpp"
#include "rogec/error.hpp"
#include "rogec/parallel.hpp"
#include "rogec/string_distance.hpp"
#include "rogec/text_model.hpp"
#include "rogec/unicode.hpp"

namespace rogec {

// ---------------------------------------------------------------------------
// Filtering

struct FilterConfig {
  std::size_t min_words = 9;
  double diacritic_ratio_min = 0.01;
  double foreign_char_ratio_max = 0.025;
  std::u32string end_marks = U".!?";
  std::vector<std::string> link_markers = {"www.", "http"};
  std::u32string forbidden_chars = U"\"„“”«»‹›‚‘";

  void validate() const {
    if (min_words < 1) throw std::invalid_argument("min_words must be at least 1");
    if (!(diacritic_ratio_min > 0) || !(foreign_char_ratio_max > 0))
      throw std::invalid_argument("filter thresholds must be positive");
  }
};

/// Filter rule ids, in the order they are checked.
enum class FilterRule : int {
  UppercaseStart = 1,
  NoQuotesOrLinks = 2,
  BalancedBrackets = 3,
  EndMark = 4,
  Diacritics = 5,
  ForeignChars = 6,
  MinWords = 7,
};

inline constexpr int kFilterRuleCount = 7;

struct FilterDecision {
  std::optional<FilterRule> rejected_by;

  bool accepted() const noexcept { return !rejected_by.has_value(); }
  static FilterDecision accept() { return {}; }
  static FilterDecision reject(FilterRule r) { return {r}; }
  friend bool operator==(const FilterDecision&, const FilterDecision&) = default;
};

/// Diacritic characters over all other characters; 0 when there are no
/// other characters.
inline double diacritic_ratio(std::u32string_view text) {
  std::size_t dia = 0, other = 0;
  for (char32_t c : text) (unicode::is_romanian_diacritic(c) ? dia : other)++;
  return other == 0 ? 0.0 : static_cast<double>(dia) / static_cast<double>(other);
}

inline double diacritic_ratio(std::string_view text) { return diacritic_ratio(unicode::decode(text)); }

/// Characters outside ASCII and the Romanian diacritics, over characters
/// inside that set.
inline double foreign_char_ratio(std::u32string_view text) {
  std::size_t inside = 0, outside = 0;
  for (char32_t c : text) (c < 0x80 || unicode::is_romanian_diacritic(c) ? inside : outside)++;
  if (outside == 0) return 0.0;
  if (inside == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(outside) / static_cast<double>(inside);
}

namespace detail {

// Lowercase stems (final period removed) that end in a period without
// ending a sentence.
inline const std::unordered_set<std::string>& romanian_abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "etc", "dl", "dna", "dra", "dlor", "dnei", "dr", "prof", "conf", "lect", "asist", "ing", "ec", "av",
      "nr", "pag", "pg", "p", "vol", "cap", "art", "alin", "lit", "pct", "str", "bd", "bdul", "sf", "ex",
      "cca", "aprox", "max", "min", "sec", "mil", "mld", "jud", "mun", "com", "gen", "lt", "col", "mr",
      "cpt", "gral", "resp", "adj", "subst", "vb", "fig", "tab", "cf", "ed", "red", "trad", "coord", "nb",
      "ian", "feb", "febr", "mart", "apr", "aug", "sept", "oct", "noi", "nov", "dec", "hr", "st"};
  return kAbbrev;
}

inline bool is_word_chunk(std::u32string_view chunk) {
  return std::any_of(chunk.begin(), chunk.end(),
                     [](char32_t c) { return unicode::is_alpha(c) || unicode::is_digit(c); });
}

// The final period belongs to an abbreviation, an initial, a dotted
// acronym such as "S.U.A." or an ellipsis.
inline bool period_is_abbreviation(std::u32string_view last_chunk) {
  std::u32string_view core = last_chunk.substr(0, last_chunk.size() - 1);
  if (core.empty()) return false;
  if (core.find(U'.') != std::u32string_view::npos) return true;
  if (core.size() == 1 && unicode::is_upper(core[0])) return true;  // initial
  return romanian_abbreviations().count(unicode::encode(unicode::to_lower(core))) > 0;
}

}  // namespace detail

/// Applies the seven corpus filters and reports the first one that fails:
///  1. the first letter is uppercase;
///  2. no quote characters and no link markers;
///  3. as many "(" as ")" and as many "[" as "]";
///  4. the text ends in an end mark that is not an abbreviation period;
///  5. diacritic ratio above the minimum;
///  6. foreign-character ratio at most the maximum;
///  7. at least min_words words.
inline FilterDecision filter_sentence(std::string_view text, const FilterConfig& cfg = {}) {
  const std::u32string t = unicode::decode(text);

  auto first_alpha = std::find_if(t.begin(), t.end(), [](char32_t c) { return unicode::is_alpha(c); });
  if (first_alpha == t.end() || !unicode::is_upper(*first_alpha)) return FilterDecision::reject(FilterRule::UppercaseStart);

  if (t.find_first_of(cfg.forbidden_chars) != std::u32string::npos)
    return FilterDecision::reject(FilterRule::NoQuotesOrLinks);
  const std::string lowered = unicode::to_lower(text);
  for (const auto& marker : cfg.link_markers)
    if (lowered.find(unicode::to_lower(marker)) != std::string::npos)
      return FilterDecision::reject(FilterRule::NoQuotesOrLinks);

  auto count = [&](char32_t c) { return std::count(t.begin(), t.end(), c); };
  if (count(U'(') != count(U')') || count(U'[') != count(U']'))
    return FilterDecision::reject(FilterRule::BalancedBrackets);

  const auto words = split_whitespace(text);
  {
    if (words.empty()) return FilterDecision::reject(FilterRule::EndMark);
    const std::u32string last = unicode::decode(words.back());
    const char32_t mark = last.back();
    if (cfg.end_marks.find(mark) == std::u32string::npos) return FilterDecision::reject(FilterRule::EndMark);
    if (mark == U'.' && detail::period_is_abbreviation(last)) return FilterDecision::reject(FilterRule::EndMark);
  }

  if (!(diacritic_ratio(std::u32string_view(t)) > cfg.diacritic_ratio_min))
    return FilterDecision::reject(FilterRule::Diacritics);

  if (foreign_char_ratio(t) > cfg.foreign_char_ratio_max) return FilterDecision::reject(FilterRule::ForeignChars);

  std::size_t n_words = 0;
  for (const auto& w : words) n_words += detail::is_word_chunk(unicode::decode(w)) ? 1 : 0;
  if (n_words < cfg.min_words) return FilterDecision::reject(FilterRule::MinWords);

  return FilterDecision::accept();
}

// ---------------------------------------------------------------------------
// Confusion sets

/// Anything that can propose substitutes for a word and supply random words.
template <typename P>
concept ConfusionSource = requires(const P& p, std::string_view w, std::size_t k) {
  { p.confusion_set(w, k) } -> std::convertible_to<std::vector<std::string>>;
  { p.vocabulary() } -> std::convertible_to<const std::vector<std::string>&>;
};

/// Spellchecker-style suggestions drawn from a lexicon: words within
/// `max_distance` character Damerau-Levenshtein edits, ranked by distance,
/// then frequency (descending), then code-point order. Lookups are cached and
/// safe to call from several threads.
class LexiconConfusionProvider {
 public:
  explicit LexiconConfusionProvider(const Lexicon& lex, std::size_t max_distance = 2)
      : words_(lex.words()), max_distance_(max_distance) {
    freqs_.reserve(words_.size());
    decoded_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      freqs_.push_back(lex.frequency(words_[i]));
      decoded_.push_back(unicode::decode(words_[i]));
      by_length_[decoded_.back().size()].push_back(i);
    }
  }

  std::size_t max_distance() const noexcept { return max_distance_; }
  const std::vector<std::string>& vocabulary() const noexcept { return words_; }

  std::vector<std::string> confusion_set(std::string_view word, std::size_t k) const {
    const std::u32string w = unicode::to_lower(unicode::decode(word));
    const std::string key = unicode::encode(w) + '\x1f' + std::to_string(k);
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    struct Cand {
      std::size_t dist;
      std::size_t idx;
    };
    std::vector<Cand> cands;
    const std::size_t lo = w.size() > max_distance_ ? w.size() - max_distance_ : 0;
    for (std::size_t len = lo; len <= w.size() + max_distance_; ++len) {
      auto bucket = by_length_.find(len);
      if (bucket == by_length_.end()) continue;
      for (std::size_t idx : bucket->second) {
        const auto& cand = decoded_[idx];
        if (cand == w) continue;
        std::size_t d = damerau_levenshtein_bounded<char32_t>(w, cand, max_distance_);
        if (d <= max_distance_) cands.push_back({d, idx});
      }
    }
    std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (freqs_[a.idx] != freqs_[b.idx]) return freqs_[a.idx] > freqs_[b.idx];
      return a.idx < b.idx;  // words_ is in code-point order
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < cands.size() && i < k; ++i) out.push_back(words_[cands[i].idx]);
    std::lock_guard lock(mu_);
    cache_.emplace(key, out);
    return out;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> freqs_;
  std::vector<std::u32string> decoded_;
  std::map<std::size_t, std::vector<std::size_t>> by_length_;
  std::size_t max_distance_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::string, std::vector<std::string>> cache_;
};

/// Suggestions read from a file of "word<TAB>sugg1 sugg2 ..." lines, e.g. the
/// dumped output of an external spellchecker. Random words come from the
/// lexicon.
class TableConfusionProvider {
 public:
  TableConfusionProvider(std::istream& in, const Lexicon& lex) : vocab_(lex.words()) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      strip_cr(line);
      if (line.empty()) continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw LineError("expected word<TAB>suggestions", line_no);
      std::string word = unicode::to_lower(line.substr(0, tab));
      auto& list = table_[word];
      for (auto& s : split_whitespace(std::string_view(line).substr(tab + 1)))
        if (unicode::to_lower(s) != word) list.push_back(std::move(s));
    }
  }

  const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }

  std::vector<std::string> confusion_set(std::string_view word, std::size_t k) const {
    auto it = table_.find(unicode::to_lower(word));
    if (it == table_.end()) return {};
    return {it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(std::min(k, it->second.size()))};
  }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::vector<std::string>> table_;
};

template <ConfusionSource P>
std::vector<std::string> confusion_set(std::string_view w, const P& provider, std::size_t k) {
  return provider.confusion_set(w, k);
}

// ---------------------------------------------------------------------------
// Corruption

struct SynthConfig {
  double p_err_mean = 0.15;
  double p_err_std = 0.2;
  double p_sub = 0.7;
  double p_del = 0.1;
  double p_ins = 0.1;
  double p_swap = 0.1;
  double char_word_rate = 0.1;
  std::size_t confusion_top_k = 20;
  std::uint64_t seed = 0;

  void validate() const {
    for (double p : {p_sub, p_del, p_ins, p_swap, char_word_rate})
      if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("rates must lie in [0,1]");
    if (std::abs(p_sub + p_del + p_ins + p_swap - 1.0) > 1e-9)
      throw std::invalid_argument("operation probabilities must sum to 1");
    if (!(p_err_std >= 0.0)) throw std::invalid_argument("p_err_std must be non-negative");
  }
};

enum class CorruptOp : std::size_t { Substitute = 0, Delete = 1, Insert = 2, Swap = 3 };

/// Per-operation totals; a commutative monoid so per-sentence tallies can be
/// reduced in any order.
struct CorruptionTally {
  std::size_t sentences = 0;
  std::size_t words = 0;          // input tokens
  std::size_t changed_words = 0;  // N_changed summed over sentences
  double changed_fraction_sum = 0.0;
  std::array<std::size_t, 4> word_ops{};
  std::array<std::size_t, 4> char_ops{};
  std::size_t empty_confusion_sets = 0;

  CorruptionTally& operator+=(const CorruptionTally& o) {
    sentences += o.sentences;
    words += o.words;
    changed_words += o.changed_words;
    changed_fraction_sum += o.changed_fraction_sum;
    for (std::size_t i = 0; i < 4; ++i) word_ops[i] += o.word_ops[i], char_ops[i] += o.char_ops[i];
    empty_confusion_sets += o.empty_confusion_sets;
    return *this;
  }
};

/// Lowercase Romanian alphabet used for character-level noise.
inline constexpr std::u32string_view kRomanianAlphabet = U"aăâbcdefghiîjklmnopqrsștțuvwxyz";

/// round-half-away-from-zero(clamp(p_err, 0, 1) * length)
inline std::size_t changed_word_count(double p_err, std::size_t length) {
  return static_cast<std::size_t>(std::lround(std::clamp(p_err, 0.0, 1.0) * static_cast<double>(length)));
}

namespace detail {

inline std::string match_capitalisation(const std::string& replacement, std::string_view original) {
  auto o = unicode::decode(original);
  if (o.empty() || !unicode::is_upper(o[0])) return replacement;
  auto r = unicode::decode(replacement);
  if (!r.empty()) r[0] = unicode::to_upper(r[0]);
  return unicode::encode(r);
}

template <typename Rng>
std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

template <typename Rng>
CorruptOp draw_op(Rng& rng, const SynthConfig& cfg) {
  std::discrete_distribution<std::size_t> d({cfg.p_sub, cfg.p_del, cfg.p_ins, cfg.p_swap});
  return static_cast<CorruptOp>(d(rng));
}

template <typename Rng>
std::string corrupt_chars(std::string_view form, CorruptOp op, Rng& rng) {
  std::u32string w = unicode::decode(form);
  auto letter = [&] { return kRomanianAlphabet[uniform_index(rng, kRomanianAlphabet.size())]; };
  switch (op) {
    case CorruptOp::Substitute:
      if (!w.empty()) {
        std::size_t pos = uniform_index(rng, w.size());
        w[pos] = letter();
      }
      break;
    case CorruptOp::Delete:
      if (w.size() >= 2) w.erase(uniform_index(rng, w.size()), 1);
      break;
    case CorruptOp::Insert: {
      std::size_t pos = uniform_index(rng, w.size() + 1);
      w.insert(w.begin() + static_cast<std::ptrdiff_t>(pos), letter());
      break;
    }
    case CorruptOp::Swap:
      if (w.size() >= 2) {
        std::size_t pos = uniform_index(rng, w.size() - 1);
        std::swap(w[pos], w[pos + 1]);
      }
      break;
  }
  return unicode::encode(w);
}

}  // namespace detail

/// Injects synthetic errors into one sentence:
///  1. p_err ~ Normal(mean, std), clamped to [0,1];
///  2. N = round(p_err * |s|);
///  3. N distinct word positions, uniformly without replacement;
///  4. per word: substitute from its confusion set, delete, insert a random
///     lexicon word after it, or swap it with its right neighbour (left
///     neighbour for the last word);
///  5. round(char_word_rate * |s|) distinct words of the resulting sentence
///     get one character-level operation with the same mix.
/// A word whose confusion set is empty is left as is.
template <ConfusionSource P, typename Rng>
Sentence corrupt_sentence(const Sentence& s, const SynthConfig& cfg, const P& provider, Rng& rng,
                          CorruptionTally* tally = nullptr) {
  if (s.empty()) throw EmptySentence();
  CorruptionTally local;
  local.sentences = 1;
  local.words = s.size();

  const double p_err = std::clamp(std::normal_distribution<double>(cfg.p_err_mean, cfg.p_err_std)(rng), 0.0, 1.0);
  const std::size_t n_changed = changed_word_count(p_err, s.size());
  local.changed_words = n_changed;
  local.changed_fraction_sum = static_cast<double>(n_changed) / static_cast<double>(s.size());

  std::vector<std::size_t> all(s.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> chosen;
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), n_changed, rng);

  // Tokens remember which input position they came from (-1 for insertions)
  // so that a chosen word is found again after earlier operations moved it.
  struct Slot {
    Token tok;
    std::ptrdiff_t origin;
  };
  std::vector<Slot> cur;
  cur.reserve(s.size() * 2);
  for (std::size_t i = 0; i < s.size(); ++i) cur.push_back({s[i], static_cast<std::ptrdiff_t>(i)});

  const auto& vocab = provider.vocabulary();
  for (std::size_t origin : chosen) {
    auto it = std::find_if(cur.begin(), cur.end(),
                           [&](const Slot& sl) { return sl.origin == static_cast<std::ptrdiff_t>(origin); });
    const CorruptOp op = detail::draw_op(rng, cfg);
    ++local.word_ops[static_cast<std::size_t>(op)];
    if (it == cur.end()) continue;
    const std::size_t pos = static_cast<std::size_t>(it - cur.begin());
    switch (op) {
      case CorruptOp::Substitute: {
        auto cands = provider.confusion_set(cur[pos].tok.form, cfg.confusion_top_k);
        if (cands.empty()) {
          ++local.empty_confusion_sets;
          break;
        }
        const auto& pick = cands[detail::uniform_index(rng, cands.size())];
        cur[pos].tok = Token{detail::match_capitalisation(pick, cur[pos].tok.form)};
        break;
      }
      case CorruptOp::Delete:
        cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(pos));
        break;
      case CorruptOp::Insert:
        if (!vocab.empty())
          cur.insert(cur.begin() + static_cast<std::ptrdiff_t>(pos + 1),
                     Slot{Token{vocab[detail::uniform_index(rng, vocab.size())]}, -1});
        break;
      case CorruptOp::Swap:
        if (cur.size() >= 2) {
          std::size_t other = pos + 1 < cur.size() ? pos + 1 : pos - 1;
          std::swap(cur[pos], cur[other]);
        }
        break;
    }
  }

  const std::size_t n_char = std::min(changed_word_count(cfg.char_word_rate, s.size()), cur.size());
  std::vector<std::size_t> positions(cur.size());
  std::iota(positions.begin(), positions.end(), 0);
  std::vector<std::size_t> char_targets;
  std::sample(positions.begin(), positions.end(), std::back_inserter(char_targets), n_char, rng);
  for (std::size_t pos : char_targets) {
    const CorruptOp op = detail::draw_op(rng, cfg);
    ++local.char_ops[static_cast<std::size_t>(op)];
    cur[pos].tok = Token{detail::corrupt_chars(cur[pos].tok.form, op, rng)};
  }

  Sentence out;
  out.source_id = s.source_id;
  out.tokens.reserve(cur.size());
  for (auto& sl : cur) out.tokens.push_back(std::move(sl.tok));
  if (tally) *tally += local;
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct SynthStats {
  std::size_t lines = 0;
  std::size_t accepted = 0;
  std::array<std::size_t, kFilterRuleCount + 1> rejected{};  // index = rule id
  CorruptionTally tally;

  SynthStats& operator+=(const SynthStats& o) {
    lines += o.lines;
    accepted += o.accepted;
    for (std::size_t i = 0; i < rejected.size(); ++i) rejected[i] += o.rejected[i];
    tally += o.tally;
    return *this;
  }
};

/// Per-sentence RNG: seed XOR sentence index, so any sentence can be
/// regenerated alone and output does not depend on scheduling.
inline std::mt19937_64 sentence_rng(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(seed ^ index);
}

struct PipelineOptions {
  std::size_t threads = 1;
  std::size_t chunk_size = 4096;
};

/// Reads one sentence per line, writes "corrupted<TAB>original" for every
/// accepted line. The original side is the input line (tabs turned into
/// spaces); the corrupted side is a rendered token sequence.
template <ConfusionSource P>
SynthStats generate_corpus(std::istream& in, const FilterConfig& fcfg, const SynthConfig& scfg, const P& provider,
                           std::ostream& out, const PipelineOptions& opts = {}) {
  fcfg.validate();
  scfg.validate();
  SynthStats stats;
  std::vector<std::string> lines;
  std::uint64_t base_index = 0;
  bool eof = false;
  while (!eof) {
    lines.clear();
    std::string line;
    while (lines.size() < std::max<std::size_t>(opts.chunk_size, 1)) {
      if (!std::getline(in, line)) {
        eof = true;
        break;
      }
      strip_cr(line);
      lines.push_back(std::move(line));
    }
    if (in.bad()) throw LineError("read error", base_index + lines.size() + 1);
    if (lines.empty()) break;

    std::vector<std::optional<std::string>> results(lines.size());
    std::vector<SynthStats> partial(lines.size());
    parallel_for(lines.size(), opts.threads, [&](std::size_t i) {
      const std::uint64_t index = base_index + i;
      SynthStats& st = partial[i];
      st.lines = 1;
      std::string text = lines[i];
      if (!unicode::is_valid(text)) throw LineError("invalid UTF-8", index + 1);
      std::replace(text.begin(), text.end(), '\t', ' ');
      auto decision = filter_sentence(text, fcfg);
      if (!decision.accepted()) {
        ++st.rejected[static_cast<std::size_t>(*decision.rejected_by)];
        return;
      }
      ++st.accepted;
      auto rng = sentence_rng(scfg.seed, index);
      Sentence corrupted = corrupt_sentence(tokenize(text), scfg, provider, rng, &st.tally);
      results[i] = render(corrupted) + '\t' + text;
    });
    for (std::size_t i = 0; i < lines.size(); ++i) {
      stats += partial[i];
      if (results[i]) out << *results[i] << '\n';
    }
    base_index += lines.size();
  }
  return stats;
}

}  // namespace rogec
