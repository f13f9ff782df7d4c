#pragma once

// Reference implementations used by the tests. They share no code with the
// library beyond the plain data types, and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rogec/text_model.hpp"
#include "rogec/unicode.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Alignment: exhaustive search over every edit path.

struct Costs {
  double w_lemma = 0.499, w_pos = 0.25, w_char = 0.25;
  double ins = 1.0, del = 1.0, transpose = 1.0;
};

// plain full-matrix OSA distance
inline std::size_t char_osa(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
    }
  return d[a.size()][b.size()];
}

inline double sub_cost(const rogec::Token& a, const rogec::Token& b, const Costs& c) {
  if (a.form == b.form) return 0.0;
  double cost = 0.0;
  if (a.lemma && b.lemma) cost += *a.lemma != *b.lemma ? c.w_lemma : 0.0;
  else cost += c.w_lemma / 2;
  if (a.upos && b.upos) cost += *a.upos != *b.upos ? c.w_pos : 0.0;
  else cost += c.w_pos / 2;
  auto ua = rogec::unicode::decode(a.form), ub = rogec::unicode::decode(b.form);
  cost += c.w_char * static_cast<double>(char_osa(ua, ub)) / static_cast<double>(std::max(ua.size(), ub.size()));
  return cost;
}

class BruteForceAligner {
 public:
  BruteForceAligner(const rogec::Sentence& o, const rogec::Sentence& c, Costs costs = {})
      : o_(o), c_(c), k_(costs) {}

  double min_cost() {
    best_ = std::numeric_limits<double>::infinity();
    dfs(0, 0, 0.0);
    return best_;
  }

 private:
  void dfs(std::size_t i, std::size_t j, double cost) {
    // every remaining length difference costs at least one insert/delete
    std::size_t ro = o_.size() - i, rc = c_.size() - j;
    double lb = ro > rc ? static_cast<double>(ro - rc) * k_.del : static_cast<double>(rc - ro) * k_.ins;
    if (cost + lb >= best_ - 1e-12) return;
    if (i == o_.size() && j == c_.size()) {
      best_ = cost;
      return;
    }
    if (i < o_.size() && j < c_.size()) dfs(i + 1, j + 1, cost + sub_cost(o_[i], c_[j], k_));
    if (i + 1 < o_.size() && j + 1 < c_.size() && o_[i].form == c_[j + 1].form && o_[i + 1].form == c_[j].form &&
        o_[i].form != o_[i + 1].form)
      dfs(i + 2, j + 2, cost + k_.transpose);
    if (i < o_.size()) dfs(i + 1, j, cost + k_.del);
    if (j < c_.size()) dfs(i, j + 1, cost + k_.ins);
  }

  const rogec::Sentence& o_;
  const rogec::Sentence& c_;
  Costs k_;
  double best_ = 0;
};

// ---------------------------------------------------------------------------
// Corpus filter, rule by rule. Returns 0 for accept, else the rule id.

inline bool ro_diacritic(char32_t c) {
  static const std::u32string kSet = U"ăâîșțĂÂÎȘȚşţŞŢ";
  return kSet.find(c) != std::u32string::npos;
}

inline int filter(const std::string& text, const std::set<std::string>& abbreviations) {
  using namespace rogec::unicode;
  std::u32string t = decode(text);

  // 1
  for (char32_t c : t) {
    if (!is_alpha(c)) continue;
    if (to_lower(c) == c) return 1;
    break;
  }
  bool any_alpha = std::any_of(t.begin(), t.end(), [](char32_t c) { return is_alpha(c); });
  if (!any_alpha) return 1;

  // 2
  for (char32_t q : std::u32string(U"\"„“”«»‹›‚‘"))
    if (t.find(q) != std::u32string::npos) return 2;
  std::u32string low;
  for (char32_t c : t) low.push_back(to_lower(c));
  if (low.find(U"www.") != std::u32string::npos || low.find(U"http") != std::u32string::npos) return 2;

  // 3
  long paren = 0, bracket = 0;
  for (char32_t c : t) {
    paren += c == U'(' ? 1 : c == U')' ? -1 : 0;
    bracket += c == U'[' ? 1 : c == U']' ? -1 : 0;
  }
  if (paren != 0 || bracket != 0) return 3;

  // 4: the last chunk must close the sentence with a real end mark
  std::vector<std::u32string> chunks;
  std::u32string cur;
  for (char32_t c : t) {
    if (is_whitespace(c)) {
      if (!cur.empty()) chunks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) chunks.push_back(cur);
  if (chunks.empty()) return 4;
  const std::u32string& last = chunks.back();
  char32_t end = last.back();
  if (end != U'.' && end != U'!' && end != U'?') return 4;
  if (end == U'.' && last.size() > 1) {
    std::u32string stem = last.substr(0, last.size() - 1);
    std::size_t letters = std::count_if(stem.begin(), stem.end(), [](char32_t c) { return is_alpha(c); });
    bool dotted = stem.find(U'.') != std::u32string::npos;
    bool initial = letters == 1 && stem.size() == 1 && is_upper(stem[0]);
    std::u32string lstem;
    for (char32_t c : stem) lstem.push_back(to_lower(c));
    bool listed = abbreviations.count(encode(lstem)) > 0;
    if (dotted || initial || listed) return 4;
  }

  // 5
  std::size_t dia = 0;
  for (char32_t c : t) dia += ro_diacritic(c);
  std::size_t rest = t.size() - dia;
  double ratio = rest ? static_cast<double>(dia) / static_cast<double>(rest) : 0.0;
  if (!(ratio > 0.01)) return 5;

  // 6
  std::size_t inside = 0;
  for (char32_t c : t) inside += (c < 0x80 || ro_diacritic(c));
  std::size_t outside = t.size() - inside;
  if (outside > 0 && (inside == 0 || static_cast<double>(outside) / static_cast<double>(inside) > 0.025)) return 6;

  // 7
  std::size_t words = 0;
  for (const auto& ch : chunks)
    words += std::any_of(ch.begin(), ch.end(), [](char32_t c) { return is_alpha(c) || (c >= U'0' && c <= U'9'); });
  if (words < 9) return 7;
  return 0;
}

// ---------------------------------------------------------------------------
// Interpolated Kneser-Ney straight from the recursive definition.

class KneserNey {
 public:
  using Gram = std::vector<std::string>;

  KneserNey(const std::vector<std::vector<std::string>>& corpus, std::size_t order) : n_(order), raw_(order + 1), adj_(order + 1) {
    for (const auto& s : corpus) {
      Gram padded(n_ - 1, "<s>");
      padded.insert(padded.end(), s.begin(), s.end());
      padded.push_back("</s>");
      for (std::size_t k = 1; k <= n_; ++k)
        for (std::size_t end = n_ - 1; end < padded.size(); ++end)
          raw_[k][Gram(padded.begin() + static_cast<long>(end + 1 - k), padded.begin() + static_cast<long>(end + 1))] += 1;
    }
    adj_[n_] = raw_[n_];
    for (std::size_t k = 1; k < n_; ++k) {
      for (const auto& [g, c] : raw_[k]) {
        if (g[0] == "<s>") {
          adj_[k][g] = c;
          continue;
        }
        std::set<std::string> left;
        for (const auto& [h, hc] : raw_[k + 1])
          if (std::equal(g.begin(), g.end(), h.begin() + 1)) left.insert(h[0]);
        adj_[k][g] = static_cast<double>(left.size());
      }
    }
    d_.assign(n_ + 1, 0.0);
    for (std::size_t k = 1; k <= n_; ++k) {
      double n1 = 0, n2 = 0;
      for (const auto& [g, a] : adj_[k]) n1 += a == 1, n2 += a == 2;
      double d = n1 + 2 * n2 > 0 ? n1 / (n1 + 2 * n2) : 0.0;
      d_[k] = (d > 0 && d < 1) ? d : 0.75;
    }
    for (const auto& [g, a] : adj_[1]) vocab_.insert(g[0]);
  }

  double discount(std::size_t k) const { return d_[k]; }

  // P(w | ctx) with ctx holding exactly k-1 tokens.
  double prob(std::size_t k, const Gram& ctx, const std::string& w) const {
    if (k == 1) {
      double total = 0;
      for (const auto& [g, a] : adj_[1]) total += a;
      double p = 0;
      if (auto it = adj_[1].find(Gram{w}); it != adj_[1].end()) p += (it->second - d_[1]) / total;
      if (w == "<unk>") p += d_[1] * static_cast<double>(adj_[1].size()) / total;
      return p;
    }
    double sum = 0, types = 0, a_w = 0;
    for (const auto& [g, a] : adj_[k]) {
      if (!std::equal(ctx.begin(), ctx.end(), g.begin())) continue;
      sum += a;
      types += 1;
      if (g.back() == w) a_w = a;
    }
    Gram shorter(ctx.begin() + 1, ctx.end());
    if (sum == 0) return prob(k - 1, shorter, w);
    return std::max(a_w - d_[k], 0.0) / sum + d_[k] * types / sum * prob(k - 1, shorter, w);
  }

  double sentence_log10(const std::vector<std::string>& s) const {
    Gram hist(n_ - 1, "<s>");
    double total = 0;
    auto step = [&](std::string w) {
      if (!vocab_.count(w)) w = "<unk>";
      Gram ctx(hist.end() - static_cast<long>(n_ - 1), hist.end());
      for (auto& c : ctx)
        if (c != "<s>" && !vocab_.count(c)) c = "<unk>";
      total += std::log10(prob(n_, ctx, w));
      hist.push_back(w);
    };
    for (const auto& w : s) step(w);
    step("</s>");
    return total;
  }

  double perplexity(const std::vector<std::vector<std::string>>& corpus) const {
    double total = 0;
    double count = 0;
    for (const auto& s : corpus) {
      total += sentence_log10(s);
      count += static_cast<double>(s.size() + 1);
    }
    return std::pow(10.0, -total / count);
  }

  const std::map<Gram, double>& raw(std::size_t k) const { return raw_[k]; }

 private:
  std::size_t n_;
  std::vector<std::map<Gram, double>> raw_;
  std::vector<std::map<Gram, double>> adj_;
  std::vector<double> d_;
  std::set<std::string> vocab_;
};

}  // namespace oracle
