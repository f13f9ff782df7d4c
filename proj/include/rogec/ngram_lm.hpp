#pragma once

// Interpolated Kneser-Ney n-gram language model: counting, training, ARPA
// serialisation, back-off queries and N-best re-ranking.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rogec/error.hpp"
#include "rogec/text_model.hpp"

namespace rogec {

inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";
inline constexpr std::string_view kUnk = "<unk>";

/// log10 probability written for n-grams that only exist as contexts.
inline constexpr double kNoProbability = -99.0;

using Ngram = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Counting

/// Raw n-gram counts for orders 1..order. Each sentence is padded with
/// order-1 "<s>" and one "</s>"; for every predicted position (each word and
/// the final "</s>") the n-grams of every order ending there are counted.
struct NgramCounts {
  std::size_t order = 5;
  std::vector<std::map<Ngram, std::uint64_t>> by_order;  // by_order[n-1]
  std::set<std::string> vocabulary{std::string(kBos), std::string(kEos), std::string(kUnk)};

  explicit NgramCounts(std::size_t ord = 5) : order(ord), by_order(ord) {
    if (ord < 1) throw std::invalid_argument("n-gram order must be at least 1");
  }

  bool empty() const {
    return std::all_of(by_order.begin(), by_order.end(), [](const auto& m) { return m.empty(); });
  }

  void add(const Sentence& s) {
    std::vector<std::string> padded(order - 1, std::string(kBos));
    for (const auto& t : s.tokens) {
      padded.push_back(t.form);
      vocabulary.insert(t.form);
    }
    padded.emplace_back(kEos);
    for (std::size_t end = order - 1; end < padded.size(); ++end)
      for (std::size_t n = 1; n <= order; ++n)
        ++by_order[n - 1][Ngram(padded.begin() + static_cast<std::ptrdiff_t>(end + 1 - n),
                                padded.begin() + static_cast<std::ptrdiff_t>(end + 1))];
  }
};

inline NgramCounts count_ngrams(const std::vector<Sentence>& corpus, std::size_t order = 5) {
  NgramCounts counts(order);
  for (const auto& s : corpus) counts.add(s);
  return counts;
}

// ---------------------------------------------------------------------------
// Model

struct ArpaEntry {
  double logprob = 0.0;
  std::optional<double> backoff;  // log10

  friend bool operator==(const ArpaEntry&, const ArpaEntry&) = default;
};

/// Back-off n-gram model with base-10 log probabilities. Immutable once
/// built, so concurrent queries are safe.
class ArpaModel {
 public:
  explicit ArpaModel(std::size_t order = 1) : entries_(order), index_(order) {
    if (order < 1) throw std::invalid_argument("model order must be at least 1");
  }

  std::size_t order() const noexcept { return entries_.size(); }

  void add(const Ngram& ngram, ArpaEntry entry) {
    if (ngram.empty() || ngram.size() > order()) throw std::invalid_argument("n-gram longer than model order");
    std::vector<std::uint32_t> ids;
    ids.reserve(ngram.size());
    for (const auto& w : ngram) ids.push_back(intern(w));
    auto key = pack(ids);
    auto& idx = index_[ngram.size() - 1];
    auto& list = entries_[ngram.size() - 1];
    if (auto it = idx.find(key); it != idx.end()) {
      list[it->second].second = entry;
      return;
    }
    idx.emplace(std::move(key), list.size());
    list.emplace_back(ngram, entry);
  }

  const std::vector<std::pair<Ngram, ArpaEntry>>& entries(std::size_t n) const { return entries_.at(n - 1); }

  std::optional<ArpaEntry> find(std::span<const std::string> ngram) const {
    if (ngram.empty() || ngram.size() > order()) return std::nullopt;
    std::vector<std::uint32_t> ids;
    for (const auto& w : ngram) {
      auto id = lookup(w);
      if (!id) return std::nullopt;
      ids.push_back(*id);
    }
    return find_ids(ids);
  }

  bool in_vocabulary(std::string_view w) const { return lookup(w).has_value() && has_unigram(*lookup(w)); }

  /// Words that can be predicted: every unigram except "<s>".
  std::vector<std::string> predictable_words() const {
    std::vector<std::string> out;
    for (const auto& [ng, e] : entries_[0])
      if (ng[0] != kBos) out.push_back(ng[0]);
    return out;
  }

  /// log10 P(word | context) by the standard back-off recursion. Words
  /// outside the unigram list are mapped to "<unk>"; if the model has no
  /// "<unk>" the result is -infinity.
  double log10_prob(std::span<const std::string> context, std::string_view word) const {
    std::vector<std::uint32_t> ids;
    const std::size_t keep = std::min(context.size(), order() - 1);
    for (std::size_t i = context.size() - keep; i < context.size(); ++i) ids.push_back(map_word(context[i]));
    ids.push_back(map_word(word));
    if (ids.back() == kMissing) return -std::numeric_limits<double>::infinity();
    double backoff = 0.0;
    for (std::size_t start = 0; start < ids.size(); ++start) {
      std::span<const std::uint32_t> ng(ids.data() + start, ids.size() - start);
      if (auto e = find_ids(ng)) return backoff + e->logprob;
      if (ng.size() > 1) {
        if (auto ctx = find_ids(ng.first(ng.size() - 1)); ctx && ctx->backoff) backoff += *ctx->backoff;
      }
    }
    return -std::numeric_limits<double>::infinity();
  }

 private:
  static constexpr std::uint32_t kMissing = std::numeric_limits<std::uint32_t>::max();

  static std::string pack(std::span<const std::uint32_t> ids) {
    std::string key(ids.size() * sizeof(std::uint32_t), '\0');
    std::memcpy(key.data(), ids.data(), key.size());
    return key;
  }

  std::uint32_t intern(const std::string& w) {
    auto [it, inserted] = vocab_.emplace(w, static_cast<std::uint32_t>(vocab_.size()));
    return it->second;
  }

  std::optional<std::uint32_t> lookup(std::string_view w) const {
    auto it = vocab_.find(std::string(w));
    if (it == vocab_.end()) return std::nullopt;
    return it->second;
  }

  bool has_unigram(std::uint32_t id) const { return index_[0].count(pack(std::span(&id, 1))) > 0; }

  std::uint32_t map_word(std::string_view w) const {
    if (auto id = lookup(w); id && has_unigram(*id)) return *id;
    if (auto unk = lookup(kUnk); unk && has_unigram(*unk)) return *unk;
    return kMissing;
  }

  std::optional<ArpaEntry> find_ids(std::span<const std::uint32_t> ids) const {
    if (ids.empty() || ids.size() > order()) return std::nullopt;
    for (auto id : ids)
      if (id == kMissing) return std::nullopt;
    const auto& idx = index_[ids.size() - 1];
    auto it = idx.find(pack(ids));
    if (it == idx.end()) return std::nullopt;
    return entries_[ids.size() - 1][it->second].second;
  }

  std::vector<std::vector<std::pair<Ngram, ArpaEntry>>> entries_;
  std::vector<std::unordered_map<std::string, std::size_t>> index_;
  std::unordered_map<std::string, std::uint32_t> vocab_;
};

// ---------------------------------------------------------------------------
// Training

struct KneserNeyOptions {
  /// One discount per order (index 0 = unigrams), each in (0,1). Empty means
  /// estimate D = n1 / (n1 + 2 n2) from the count-of-counts of each order.
  std::vector<double> discounts;
};

struct TrainReport {
  std::vector<double> discounts;
  std::vector<std::string> warnings;
};

inline constexpr double kFallbackDiscount = 0.75;

namespace detail {

inline bool is_bos_context(const Ngram& g) {
  return std::all_of(g.begin(), g.end(), [](const std::string& w) { return w == kBos; });
}

inline Ngram drop_first(const Ngram& g) { return Ngram(g.begin() + 1, g.end()); }
inline Ngram drop_last(const Ngram& g) { return Ngram(g.begin(), g.end() - 1); }

}  // namespace detail

/// Interpolated Kneser-Ney with one absolute discount per order.
///  - The highest order uses raw counts; lower orders use continuation
///    counts (distinct left extensions), except n-grams starting with "<s>",
///    which cannot be extended and keep their raw counts.
///  - Unigrams are discounted and the freed mass goes to "<unk>".
///  - Every higher-order probability interpolates with the next lower order;
///    the interpolation weight of a context is its back-off weight.
/// A degenerate count-of-counts (estimate outside (0,1)) falls back to a
/// discount of 0.75 and records a warning.
inline ArpaModel train_kneser_ney(const NgramCounts& counts, const KneserNeyOptions& opts = {},
                                  TrainReport* report = nullptr) {
  if (counts.empty()) throw EmptyInput();
  const std::size_t N = counts.order;
  if (!opts.discounts.empty()) {
    if (opts.discounts.size() != N) throw std::invalid_argument("need one discount per order");
    for (double d : opts.discounts)
      if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("discounts must lie in (0,1)");
  }

  // adjusted counts
  std::vector<std::map<Ngram, std::uint64_t>> adj(N);
  adj[N - 1] = counts.by_order[N - 1];
  for (std::size_t n = N - 1; n >= 1; --n) {
    auto& cur = adj[n - 1];
    for (const auto& [g, c] : counts.by_order[n - 1])
      if (g[0] == kBos) cur[g] = c;
    for (const auto& [g, c] : counts.by_order[n]) {
      Ngram suffix = detail::drop_first(g);
      if (suffix[0] != kBos) ++cur[suffix];
    }
  }

  TrainReport rep;
  std::vector<double> D(N);
  for (std::size_t n = 1; n <= N; ++n) {
    if (!opts.discounts.empty()) {
      D[n - 1] = opts.discounts[n - 1];
      continue;
    }
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [g, a] : adj[n - 1]) {
      n1 += a == 1;
      n2 += a == 2;
    }
    double d = (n1 + 2 * n2) ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2) : 0.0;
    if (!(d > 0.0 && d < 1.0)) {
      rep.warnings.push_back("DegenerateCounts: order " + std::to_string(n) + " has n1=" + std::to_string(n1) +
                             ", n2=" + std::to_string(n2) + "; using discount " +
                             std::to_string(kFallbackDiscount));
      d = kFallbackDiscount;
    }
    D[n - 1] = d;
  }
  rep.discounts = D;

  // linear probabilities per order, and interpolation weights per context
  std::vector<std::map<Ngram, double>> prob(N);
  std::vector<std::map<Ngram, double>> gamma(N);  // gamma[n-1]: contexts of length n (n < N)

  {
    double total = 0;
    for (const auto& [g, a] : adj[0]) total += static_cast<double>(a);
    for (const auto& [g, a] : adj[0]) prob[0][g] = (static_cast<double>(a) - D[0]) / total;
    const double leftover = D[0] * static_cast<double>(adj[0].size()) / total;
    prob[0][Ngram{std::string(kUnk)}] += leftover;
  }

  auto lower_prob = [&](std::size_t n, const Ngram& g) -> double {
    // interpolated probability of the (n)-gram g at order n, g seen or not
    double bo_mass = 1.0;
    for (std::size_t k = n; k >= 1; --k) {
      Ngram tail(g.end() - static_cast<std::ptrdiff_t>(k), g.end());
      if (auto it = prob[k - 1].find(tail); it != prob[k - 1].end()) return bo_mass * it->second;
      if (k > 1) {
        Ngram ctx = detail::drop_last(tail);
        auto gi = gamma[k - 2].find(ctx);
        bo_mass *= gi == gamma[k - 2].end() ? 1.0 : gi->second;
      }
    }
    return bo_mass * prob[0][Ngram{std::string(kUnk)}];
  };

  for (std::size_t n = 2; n <= N; ++n) {
    std::map<Ngram, std::pair<double, std::size_t>> ctx_stats;  // sum, types
    for (const auto& [g, a] : adj[n - 1]) {
      auto& st = ctx_stats[detail::drop_last(g)];
      st.first += static_cast<double>(a);
      ++st.second;
    }
    for (const auto& [ctx, st] : ctx_stats) gamma[n - 2][ctx] = D[n - 1] * static_cast<double>(st.second) / st.first;
    for (const auto& [g, a] : adj[n - 1]) {
      Ngram ctx = detail::drop_last(g);
      const auto& st = ctx_stats[ctx];
      prob[n - 1][g] = (static_cast<double>(a) - D[n - 1]) / st.first +
                       gamma[n - 2][ctx] * lower_prob(n - 1, detail::drop_first(g));
    }
  }

  ArpaModel model(N);
  for (std::size_t n = 1; n <= N; ++n) {
    std::map<Ngram, ArpaEntry> out;
    for (const auto& [g, p] : prob[n - 1]) out[g].logprob = std::log10(p);
    if (n < N) {
      for (const auto& [ctx, gm] : gamma[n - 1]) {
        auto [it, inserted] = out.try_emplace(ctx);
        if (inserted) it->second.logprob = kNoProbability;  // pure "<s>" context
        it->second.backoff = std::log10(gm);
      }
    }
    if (n == 1) out.try_emplace(Ngram{std::string(kBos)}, ArpaEntry{kNoProbability, std::nullopt});
    for (auto& [g, e] : out) model.add(g, e);
  }
  if (report) *report = std::move(rep);
  return model;
}

// ---------------------------------------------------------------------------
// ARPA I/O

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline void write_arpa(std::ostream& out, const ArpaModel& model) {
  out << "\\data\\\n";
  for (std::size_t n = 1; n <= model.order(); ++n) out << "ngram " << n << '=' << model.entries(n).size() << '\n';
  for (std::size_t n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    for (const auto& [g, e] : model.entries(n)) {
      out << detail::format_double(e.logprob) << '\t';
      for (std::size_t k = 0; k < g.size(); ++k) out << (k ? " " : "") << g[k];
      if (e.backoff) out << '\t' << detail::format_double(*e.backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

inline ArpaModel read_arpa(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    strip_cr(line);
    return true;
  };

  bool found_data = false;
  while (next()) {
    if (detail::trim(line) == "\\data\\") {
      found_data = true;
      break;
    }
  }
  if (!found_data) throw MalformedArpa(line_no + 1, "missing \\data\\ header");

  std::vector<std::size_t> declared;
  bool have_line = false;
  while ((have_line = next())) {
    auto t = detail::trim(line);
    if (t.empty()) {
      if (declared.empty()) continue;
      break;
    }
    if (!t.starts_with("ngram ")) break;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw MalformedArpa(line_no);
    long n = 0, cnt = 0;
    auto ns = detail::trim(t.substr(6, eq - 6)), cs = detail::trim(t.substr(eq + 1));
    if (std::from_chars(ns.data(), ns.data() + ns.size(), n).ec != std::errc{} ||
        std::from_chars(cs.data(), cs.data() + cs.size(), cnt).ec != std::errc{} || n < 1 || cnt < 0 ||
        static_cast<std::size_t>(n) != declared.size() + 1)
      throw MalformedArpa(line_no);
    declared.push_back(static_cast<std::size_t>(cnt));
  }
  if (declared.empty()) throw MalformedArpa(line_no, "no ngram counts");

  ArpaModel model(declared.size());
  std::size_t section = 0;
  std::size_t seen = 0;
  // the current line may already be a section header
  bool pending = have_line && !detail::trim(line).empty();
  while (pending || next()) {
    pending = false;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t == "\\end\\") {
      if (section && seen != declared[section - 1]) throw MalformedArpa(line_no, "n-gram count mismatch");
      if (section != declared.size()) throw MalformedArpa(line_no, "missing n-gram section");
      return model;
    }
    if (t.front() == '\\') {
      if (section && seen != declared[section - 1]) throw MalformedArpa(line_no, "n-gram count mismatch");
      std::size_t n = 0;
      auto dash = t.find("-grams:");
      if (dash == std::string_view::npos ||
          std::from_chars(t.data() + 1, t.data() + dash, n).ec != std::errc{} || n != section + 1)
        throw MalformedArpa(line_no, "bad section header");
      section = n;
      seen = 0;
      continue;
    }
    if (!section) throw MalformedArpa(line_no);
    auto fields = split_whitespace(t);
    if (fields.size() != section + 1 && fields.size() != section + 2) throw MalformedArpa(line_no);
    auto lp = detail::parse_double(fields[0]);
    if (!lp) throw MalformedArpa(line_no);
    ArpaEntry e{*lp, std::nullopt};
    if (fields.size() == section + 2) {
      auto bo = detail::parse_double(fields.back());
      if (!bo) throw MalformedArpa(line_no);
      e.backoff = *bo;
    }
    model.add(Ngram(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(section)), e);
    ++seen;
  }
  throw MalformedArpa(line_no + 1, "missing \\end\\");
}

// ---------------------------------------------------------------------------
// Queries

/// Sum of log10 P(w_i | history) over all words and the closing "</s>".
inline double logprob(const ArpaModel& model, const Sentence& s) {
  std::vector<std::string> history(model.order() > 1 ? model.order() - 1 : 0, std::string(kBos));
  double total = 0.0;
  auto step = [&](const std::string& w) {
    total += model.log10_prob(history, w);
    history.push_back(w);
  };
  for (const auto& t : s.tokens) step(t.form);
  step(std::string(kEos));
  return total;
}

/// logprob divided by the number of predictions, |s| + 1.
inline double normalized_logprob(const ArpaModel& model, const Sentence& s) {
  return logprob(model, s) / static_cast<double>(s.size() + 1);
}

inline double perplexity(const ArpaModel& model, const std::vector<Sentence>& corpus) {
  double total = 0.0;
  std::size_t predictions = 0;
  for (const auto& s : corpus) {
    total += logprob(model, s);
    predictions += s.size() + 1;
  }
  if (predictions == 0) return 1.0;
  return std::pow(10.0, -total / static_cast<double>(predictions));
}

// ---------------------------------------------------------------------------
// N-best re-ranking

struct Hypothesis {
  Sentence tokens;
  double model_score = 0.0;  // decoder log-probability
};

struct RerankConfig {
  double lm_weight = 1.0;
  bool length_normalize = false;
};

/// decoder score (optionally divided by max(1, |tokens|)) plus
/// lm_weight * normalized_logprob.
inline double rerank_score(const Hypothesis& h, const ArpaModel& model, const RerankConfig& cfg) {
  double decoder = h.model_score;
  if (cfg.length_normalize) decoder /= static_cast<double>(std::max<std::size_t>(1, h.tokens.size()));
  if (cfg.lm_weight == 0.0) return decoder;
  return decoder + cfg.lm_weight * normalized_logprob(model, h.tokens);
}

/// Index of the best hypothesis; ties go to the lowest index.
inline std::size_t rerank(const std::vector<Hypothesis>& hyps, const ArpaModel& model, const RerankConfig& cfg = {}) {
  if (hyps.empty()) throw EmptyHypothesisList();
  if (cfg.lm_weight < 0) throw std::invalid_argument("lm_weight must be non-negative");
  std::size_t best = 0;
  double best_score = rerank_score(hyps[0], model, cfg);
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    double s = rerank_score(hyps[i], model, cfg);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

/// Reads groups of "sentence<TAB>score" lines separated by blank lines.
inline std::vector<std::vector<Hypothesis>> read_nbest(std::istream& in) {
  std::vector<std::vector<Hypothesis>> groups;
  std::vector<Hypothesis> cur;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      if (!cur.empty()) groups.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw LineError("expected sentence<TAB>score", line_no);
    auto score = detail::parse_double(detail::trim(std::string_view(line).substr(tab + 1)));
    if (!score || !std::isfinite(*score)) throw LineError("bad hypothesis score", line_no);
    std::string_view text = std::string_view(line).substr(0, tab);
    if (!unicode::is_valid(text)) throw LineError("invalid UTF-8", line_no);
    cur.push_back({tokenize_or_empty(text), *score});
  }
  if (!cur.empty()) groups.push_back(std::move(cur));
  return groups;
}

}  // namespace rogec
