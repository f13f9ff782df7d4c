#pragma once

// Token-level Damerau-Levenshtein alignment with linguistic substitution
// costs, and the merge step that turns an alignment path into edits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rogec/error.hpp"
#include "rogec/error_type.hpp"
#include "rogec/string_distance.hpp"
#include "rogec/text_model.hpp"
#include "rogec/unicode.hpp"

namespace rogec {

enum class OpKind { Match, Substitute, Insert, Delete, Transpose };

/// One step of an alignment path. `o_index` and `c_index` are the path
/// coordinates before the step is taken.
struct AlignOp {
  OpKind kind;
  std::size_t o_index;
  std::size_t c_index;

  std::size_t o_len() const {
    switch (kind) {
      case OpKind::Insert: return 0;
      case OpKind::Transpose: return 2;
      default: return 1;
    }
  }
  std::size_t c_len() const {
    switch (kind) {
      case OpKind::Delete: return 0;
      case OpKind::Transpose: return 2;
      default: return 1;
    }
  }

  friend bool operator==(const AlignOp&, const AlignOp&) = default;
};

/// Half-open token range.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Edit {
  Span o_span;
  Span c_span;
  std::string o_text;
  std::string c_text;
  std::optional<ErrorType> etype;

  friend bool operator==(const Edit&, const Edit&) = default;
};

struct CostParams {
  double w_lemma = 0.499;
  double w_pos = 0.25;
  double w_char = 0.25;
  double insert_cost = 1.0;
  double delete_cost = 1.0;
  double transpose_cost = 1.0;

  /// Throws std::invalid_argument unless every weight is non-negative and the
  /// largest possible substitution cost stays below a delete plus an insert.
  void validate() const {
    if (w_lemma < 0 || w_pos < 0 || w_char < 0 || insert_cost < 0 || delete_cost < 0 ||
        transpose_cost < 0)
      throw std::invalid_argument("cost weights must be non-negative");
    if (!(w_lemma + w_pos + w_char < insert_cost + delete_cost))
      throw std::invalid_argument("substitution cost must stay below insert + delete cost");
  }
};

namespace detail {

template <typename T>
double feature_mismatch(const std::optional<T>& a, const std::optional<T>& b, double weight) {
  if (a && b) return *a == *b ? 0.0 : weight;
  return weight / 2;
}

inline bool is_punct_token(const Token& t) {
  auto cps = unicode::decode(t.form);
  return !cps.empty() && std::all_of(cps.begin(), cps.end(), [](char32_t c) { return unicode::is_punct(c); });
}

}  // namespace detail

/// Character-level Damerau-Levenshtein distance normalised by the longer form.
inline double normalized_char_distance(std::string_view a, std::string_view b) {
  auto ua = unicode::decode(a), ub = unicode::decode(b);
  std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 0.0;
  return static_cast<double>(damerau_levenshtein<char32_t>(ua, ub)) / static_cast<double>(longest);
}

inline double sub_cost(const Token& a, const Token& b, const CostParams& p = {}) {
  if (a.form == b.form) return 0.0;
  return detail::feature_mismatch(a.lemma, b.lemma, p.w_lemma) +
         detail::feature_mismatch(a.upos, b.upos, p.w_pos) +
         p.w_char * normalized_char_distance(a.form, b.form);
}

namespace detail {

inline bool transposable(const Sentence& o, const Sentence& c, std::size_t i, std::size_t j) {
  return i >= 2 && j >= 2 && o[i - 2].form == c[j - 1].form && o[i - 1].form == c[j - 2].form &&
         o[i - 2].form != o[i - 1].form;
}

}  // namespace detail

/// Cost of a single alignment step.
inline double op_cost(const AlignOp& op, const Sentence& o, const Sentence& c, const CostParams& p) {
  switch (op.kind) {
    case OpKind::Match: return 0.0;
    case OpKind::Substitute: return sub_cost(o[op.o_index], c[op.c_index], p);
    case OpKind::Insert: return p.insert_cost;
    case OpKind::Delete: return p.delete_cost;
    case OpKind::Transpose: return p.transpose_cost;
  }
  return 0.0;
}

inline double path_cost(const std::vector<AlignOp>& ops, const Sentence& o, const Sentence& c,
                        const CostParams& p = {}) {
  double total = 0.0;
  for (const auto& op : ops) total += op_cost(op, o, c, p);
  return total;
}

/// Minimal-cost alignment path from (0,0) to (|orig|,|corr|). When several
/// steps reach a cell at equal cost the backtrace prefers
/// Match > Substitute > Transpose > Delete > Insert.
inline std::vector<AlignOp> align(const Sentence& orig, const Sentence& corr, const CostParams& p = {}) {
  p.validate();
  const std::size_t n = orig.size(), m = corr.size();
  const std::size_t width = m + 1;
  std::vector<double> sub((n + 1) * width, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j) sub[i * width + j] = sub_cost(orig[i - 1], corr[j - 1], p);

  std::vector<double> dp((n + 1) * width, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return dp[i * width + j]; };
  for (std::size_t i = 1; i <= n; ++i) at(i, 0) = at(i - 1, 0) + p.delete_cost;
  for (std::size_t j = 1; j <= m; ++j) at(0, j) = at(0, j - 1) + p.insert_cost;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      double best = std::min({at(i - 1, j - 1) + sub[i * width + j], at(i - 1, j) + p.delete_cost,
                              at(i, j - 1) + p.insert_cost});
      if (detail::transposable(orig, corr, i, j)) best = std::min(best, at(i - 2, j - 2) + p.transpose_cost);
      at(i, j) = best;
    }
  }

  constexpr double kEps = 1e-9;
  auto same = [](double a, double b) { return std::abs(a - b) <= kEps; };
  std::vector<AlignOp> ops;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const double here = at(i, j);
    if (i > 0 && j > 0 && same(at(i - 1, j - 1) + sub[i * width + j], here)) {
      bool match = orig[i - 1].form == corr[j - 1].form;
      ops.push_back({match ? OpKind::Match : OpKind::Substitute, i - 1, j - 1});
      --i, --j;
    } else if (detail::transposable(orig, corr, i, j) && same(at(i - 2, j - 2) + p.transpose_cost, here)) {
      ops.push_back({OpKind::Transpose, i - 2, j - 2});
      i -= 2, j -= 2;
    } else if (i > 0 && same(at(i - 1, j) + p.delete_cost, here)) {
      ops.push_back({OpKind::Delete, i - 1, j});
      --i;
    } else {
      ops.push_back({OpKind::Insert, i, j - 1});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

namespace detail {

inline std::string join_forms(const Sentence& s, Span span) {
  std::string out;
  for (std::size_t k = span.begin; k < span.end; ++k) {
    if (k > span.begin) out.push_back(' ');
    out += s[k].form;
  }
  return out;
}

inline bool touches_punct(const Sentence& o, const Sentence& c, const Edit& e) {
  for (std::size_t k = e.o_span.begin; k < e.o_span.end; ++k)
    if (is_punct_token(o[k])) return true;
  for (std::size_t k = e.c_span.begin; k < e.c_span.end; ++k)
    if (is_punct_token(c[k])) return true;
  return false;
}

inline Edit make_edit(const Sentence& o, const Sentence& c, Span os, Span cs) {
  return Edit{os, cs, join_forms(o, os), join_forms(c, cs), std::nullopt};
}

}  // namespace detail

/// Turns an alignment path into edits:
///  - each maximal run of Substitute/Insert/Delete steps is one edit;
///  - each Transpose is an edit of its own;
///  - two non-transposition edits separated by exactly one matched
///    punctuation token are joined when either of them touches punctuation.
inline std::vector<Edit> merge_ops(const std::vector<AlignOp>& ops, const Sentence& orig,
                                   const Sentence& corr) {
  struct Piece {
    Span o, c;
    bool transpose;
  };
  std::vector<Piece> pieces;
  bool open = false;
  for (const auto& op : ops) {
    Span os{op.o_index, op.o_index + op.o_len()};
    Span cs{op.c_index, op.c_index + op.c_len()};
    if (op.kind == OpKind::Match) {
      open = false;
    } else if (op.kind == OpKind::Transpose) {
      pieces.push_back({os, cs, true});
      open = false;
    } else if (open) {
      pieces.back().o.end = os.end;
      pieces.back().c.end = cs.end;
    } else {
      pieces.push_back({os, cs, false});
      open = true;
    }
  }

  std::vector<Edit> edits;
  std::vector<bool> is_transpose;
  for (const auto& pc : pieces) {
    Edit e = detail::make_edit(orig, corr, pc.o, pc.c);
    if (!edits.empty() && !pc.transpose && !is_transpose.back()) {
      Edit& prev = edits.back();
      bool one_match_between = pc.o.begin == prev.o_span.end + 1 && pc.c.begin == prev.c_span.end + 1;
      if (one_match_between && detail::is_punct_token(orig[prev.o_span.end]) &&
          (detail::touches_punct(orig, corr, prev) || detail::touches_punct(orig, corr, e))) {
        prev = detail::make_edit(orig, corr, {prev.o_span.begin, pc.o.end}, {prev.c_span.begin, pc.c.end});
        continue;
      }
    }
    edits.push_back(std::move(e));
    is_transpose.push_back(pc.transpose);
  }
  return edits;
}

inline std::vector<Edit> extract_edits(const Sentence& orig, const Sentence& corr, const CostParams& p = {}) {
  return merge_ops(align(orig, corr, p), orig, corr);
}

/// Replays edits on the original. Replacement tokens come from splitting
/// c_text on spaces and carry no annotations.
inline Sentence apply_edits(const Sentence& orig, const std::vector<Edit>& edits) {
  std::size_t prev_end = 0;
  for (std::size_t k = 0; k < edits.size(); ++k) {
    const auto& e = edits[k];
    if (e.o_span.begin > e.o_span.end || e.o_span.end > orig.size()) throw SpanOutOfBounds();
    if (k > 0 && e.o_span.begin < prev_end) throw OverlappingEdits();
    if (k > 0 && e.o_span.begin < edits[k - 1].o_span.begin) throw OverlappingEdits();
    prev_end = e.o_span.end;
  }
  Sentence out;
  out.source_id = orig.source_id;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    for (; pos < e.o_span.begin; ++pos) out.tokens.push_back(orig[pos]);
    for (auto& form : split_whitespace(e.c_text)) out.tokens.emplace_back(std::move(form));
    pos = e.o_span.end;
  }
  for (; pos < orig.size(); ++pos) out.tokens.push_back(orig[pos]);
  return out;
}

}  // namespace rogec
