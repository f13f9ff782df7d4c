#pragma once

// Edit-based evaluation: TP/FP/FN by edit comparison, precision, recall and
// F-beta, and per-category corpus statistics.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "rogec/align.hpp"
#include "rogec/error.hpp"
#include "rogec/error_type.hpp"

namespace rogec {

/// What two edits must share to count as the same correction. The type
/// label is deliberately not part of it.
struct EditKey {
  std::size_t o_begin;
  std::size_t o_end;
  std::string c_text;

  explicit EditKey(const Edit& e) : o_begin(e.o_span.begin), o_end(e.o_span.end), c_text(e.c_text) {}
  friend bool operator==(const EditKey&, const EditKey&) = default;
  friend auto operator<=>(const EditKey&, const EditKey&) = default;
};

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;

  Counts& operator+=(const Counts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn;
    return *this;
  }
  friend Counts operator+(Counts a, const Counts& b) { return a += b; }
  friend bool operator==(const Counts&, const Counts&) = default;
};

namespace detail {

struct Matching {
  Counts counts;
  std::map<std::string, Counts> per_type;
};

// Each reference edit can be consumed by at most one hypothesis edit.
inline Matching match_edits(const std::vector<Edit>& ref, const std::vector<Edit>& hyp) {
  Matching m;
  std::vector<bool> used(ref.size(), false);
  for (const auto& h : hyp) {
    EditKey hk(h);
    bool found = false;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      if (!used[k] && EditKey(ref[k]) == hk) {
        used[k] = true;
        found = true;
        ++m.counts.tp;
        ++m.per_type[type_label(ref[k].etype)].tp;
        break;
      }
    }
    if (!found) {
      ++m.counts.fp;
      ++m.per_type[type_label(h.etype)].fp;
    }
  }
  for (std::size_t k = 0; k < ref.size(); ++k) {
    if (!used[k]) {
      ++m.counts.fn;
      ++m.per_type[type_label(ref[k].etype)].fn;
    }
  }
  return m;
}

}  // namespace detail

/// TP/FP/FN of one sentence's hypothesis edits against its reference edits.
inline Counts compare(const std::vector<Edit>& ref, const std::vector<Edit>& hyp) {
  return detail::match_edits(ref, hyp).counts;
}

inline double f_beta(double precision, double recall, double beta = 0.5) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return (1.0 + b2) * precision * recall / denom;
}

struct ScoreReport {
  std::size_t tp = 0, fp = 0, fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_beta = 1.0;
  double beta = 0.5;
  /// Keyed by type label ("UNK" for untyped edits). TP and FN use the
  /// reference edit's type, FP the hypothesis edit's own type.
  std::map<std::string, Counts> per_type;
};

/// Precision and recall are 1.0 when their denominators are zero, so a
/// corpus with nothing to correct and nothing proposed scores P=R=F=1.
inline ScoreReport make_report(const Counts& c, double beta, std::map<std::string, Counts> per_type = {}) {
  ScoreReport r;
  r.tp = c.tp, r.fp = c.fp, r.fn = c.fn;
  r.beta = beta;
  r.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 1.0;
  r.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 1.0;
  r.f_beta = f_beta(r.precision, r.recall, beta);
  r.per_type = std::move(per_type);
  return r;
}

/// Micro-averaged score over index-aligned sentences.
inline ScoreReport score_corpus(const std::vector<std::vector<Edit>>& refs,
                                const std::vector<std::vector<Edit>>& hyps, double beta = 0.5) {
  if (refs.size() != hyps.size()) throw LengthMismatch(refs.size(), hyps.size());
  Counts total;
  std::map<std::string, Counts> per_type;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto m = detail::match_edits(refs[i], hyps[i]);
    total += m.counts;
    for (const auto& [label, c] : m.per_type) per_type[label] += c;
  }
  return make_report(total, beta, std::move(per_type));
}

inline std::string format_fixed(double v, int decimals = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

inline std::string format_report(const ScoreReport& r) {
  std::ostringstream os;
  const std::string f_name = "F" + format_fixed(r.beta, r.beta == static_cast<int>(r.beta) ? 0 : 1);
  os << "TP\tFP\tFN\tPrec\tRec\t" << f_name << '\n';
  os << r.tp << '\t' << r.fp << '\t' << r.fn << '\t' << format_fixed(r.precision) << '\t'
     << format_fixed(r.recall) << '\t' << format_fixed(r.f_beta) << '\n';
  if (!r.per_type.empty()) {
    os << '\n' << "Type\tTP\tFP\tFN\tPrec\tRec\t" << f_name << '\n';
    for (const auto& [label, c] : r.per_type) {
      auto t = make_report(c, r.beta);
      os << label << '\t' << c.tp << '\t' << c.fp << '\t' << c.fn << '\t' << format_fixed(t.precision)
         << '\t' << format_fixed(t.recall) << '\t' << format_fixed(t.f_beta) << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Corpus statistics

inline constexpr std::array<std::string_view, 6> kGroupOrder = {"POS", "MORPH", "ORTH", "SPELL", "ORDER", "OTHER"};

struct CorpusStats {
  std::map<ErrorType, std::size_t> by_type;
  std::map<std::string, std::size_t> by_group;  // POS/MORPH/ORTH/SPELL/ORDER/OTHER
  std::size_t untyped = 0;
  std::size_t total = 0;  // typed + untyped
  std::size_t sentences = 0;

  void add(const std::optional<ErrorType>& t) {
    ++total;
    if (!t) {
      ++untyped;
      return;
    }
    ++by_type[*t];
    ++by_group[std::string(group_name(*t))];
  }

  CorpusStats& operator+=(const CorpusStats& o) {
    for (const auto& [t, n] : o.by_type) by_type[t] += n;
    for (const auto& [g, n] : o.by_group) by_group[g] += n;
    untyped += o.untyped;
    total += o.total;
    sentences += o.sentences;
    return *this;
  }
};

inline CorpusStats corpus_stats(const std::vector<std::vector<Edit>>& typed_edits) {
  CorpusStats s;
  for (const auto& sent : typed_edits) {
    ++s.sentences;
    for (const auto& e : sent) s.add(e.etype);
  }
  return s;
}

/// count/total as a percentage truncated (not rounded) to one decimal.
inline std::string percent_string(std::size_t count, std::size_t total) {
  if (total == 0) return "0.0%";
  std::size_t permille = count * 1000 / total;
  return std::to_string(permille / 10) + "." + std::to_string(permille % 10) + "%";
}

inline std::string format_stats(const CorpusStats& s) {
  std::ostringstream os;
  os << "sentences\t" << s.sentences << '\n' << "edits\t" << s.total << "\n\n";
  os << "Group\tCount\tPercent\n";
  for (auto g : kGroupOrder) {
    auto it = s.by_group.find(std::string(g));
    std::size_t n = it == s.by_group.end() ? 0 : it->second;
    os << g << '\t' << n << '\t' << percent_string(n, s.total) << '\n';
  }
  if (s.untyped) os << kUnknownTypeLabel << '\t' << s.untyped << '\t' << percent_string(s.untyped, s.total) << '\n';
  os << "\nType\tCount\tPercent\n";
  for (const auto& [t, n] : s.by_type) os << to_string(t) << '\t' << n << '\t' << percent_string(n, s.total) << '\n';
  return os.str();
}

}  // namespace rogec
