#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "rogec/score.hpp"

using namespace rogec;

namespace {

Edit E(std::size_t b, std::size_t e, std::string corr, std::optional<ErrorType> t = std::nullopt) {
  Edit x;
  x.o_span = {b, e};
  x.c_text = std::move(corr);
  x.etype = t;
  return x;
}

}  // namespace

TEST(Compare, Examples) {
  auto a = E(0, 1, "x"), b = E(2, 3, "y"), c = E(4, 4, "z"), d = E(5, 6, "");
  Counts same = compare({a, b}, {a, b});
  EXPECT_EQ(same.tp, 2u);
  EXPECT_EQ(same.fp, 0u);
  EXPECT_EQ(same.fn, 0u);
  Counts none = compare({a, b, c}, {});
  EXPECT_EQ(none.tp, 0u);
  EXPECT_EQ(none.fn, 3u);
  Counts mixed = compare({a, b, c}, {a, d});
  EXPECT_EQ(mixed.tp, 1u);
  EXPECT_EQ(mixed.fp, 1u);
  EXPECT_EQ(mixed.fn, 2u);
}

TEST(Compare, TypeDoesNotAffectMatching) {
  auto r = E(0, 1, "x", ErrorType::spell()), h = E(0, 1, "x", ErrorType::other());
  EXPECT_EQ(compare({r}, {h}).tp, 1u);
  EXPECT_EQ(compare({E(0, 1, "x")}, {E(0, 1, "X")}).tp, 0u);
}

TEST(Compare, DuplicatesMatchOnce) {
  auto a = E(0, 1, "x");
  Counts c = compare({a}, {a, a});
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 1u);
  Counts d = compare({a, a}, {a, a});
  EXPECT_EQ(d.tp, 2u);
}

TEST(FBeta, KnownValue) { EXPECT_NEAR(f_beta(0.5353, 0.2636, 0.5), 0.4438, 1e-4); }

TEST(FBeta, EqualPAndRGiveThatValue) {
  for (double x : {0.1, 0.37, 0.9})
    for (double beta : {0.5, 1.0, 2.0}) EXPECT_NEAR(f_beta(x, x, beta), x, 1e-12);
}

TEST(FBeta, FromCounts) {
  auto r = make_report(Counts{2, 1, 3}, 0.5);
  EXPECT_NEAR(r.precision, 2.0 / 3, 1e-12);
  EXPECT_NEAR(r.recall, 0.4, 1e-12);
  EXPECT_NEAR(r.f_beta, 0.5882, 1e-4);
}

TEST(FBeta, BetaOneIsHarmonicMean) {
  double p = 0.3, r = 0.8;
  EXPECT_NEAR(f_beta(p, r, 1.0), 2 * p * r / (p + r), 1e-12);
}

TEST(FBeta, ZeroWhenBothZero) { EXPECT_EQ(f_beta(0.0, 0.0), 0.0); }

TEST(FBeta, Monotone) {
  for (double r : {0.1, 0.5, 0.9}) {
    double prev = 0.0;
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      double f = f_beta(p, r);
      EXPECT_GE(f + 1e-15, prev);
      prev = f;
    }
  }
}

TEST(ScoreCorpus, PerfectAndEmpty) {
  auto a = E(0, 1, "x");
  auto rep = score_corpus({{a}, {}}, {{a}, {}});
  EXPECT_EQ(rep.f_beta, 1.0);
  auto nothing = score_corpus({{}, {}}, {{}, {}});
  EXPECT_EQ(nothing.precision, 1.0);
  EXPECT_EQ(nothing.recall, 1.0);
  EXPECT_EQ(nothing.f_beta, 1.0);
}

TEST(ScoreCorpus, MicroAggregation) {
  auto a = E(0, 1, "x"), b = E(2, 3, "y"), c = E(1, 2, "w");
  // (1,0,1) and (1,1,0)
  auto rep = score_corpus({{a, b}, {a}}, {{a}, {a, c}});
  EXPECT_EQ(rep.tp, 2u);
  EXPECT_EQ(rep.fp, 1u);
  EXPECT_EQ(rep.fn, 1u);
  EXPECT_NEAR(rep.precision, 2.0 / 3, 1e-12);
  EXPECT_NEAR(rep.recall, 2.0 / 3, 1e-12);
  EXPECT_NEAR(rep.f_beta, 2.0 / 3, 1e-12);
}

TEST(ScoreCorpus, LengthMismatch) { EXPECT_THROW(score_corpus({{}}, {}), LengthMismatch); }

TEST(ScoreCorpus, PerTypeAttribution) {
  auto r1 = E(0, 1, "x", ErrorType::spell());
  auto r2 = E(2, 3, "y", ErrorType::order());
  auto h1 = E(0, 1, "x", ErrorType::other());
  auto h2 = E(4, 5, "z", ErrorType::pos_of(UPos::NOUN));
  auto rep = score_corpus({{r1, r2}}, {{h1, h2}});
  EXPECT_EQ(rep.per_type.at("SPELL").tp, 1u);
  EXPECT_EQ(rep.per_type.at("ORDER").fn, 1u);
  EXPECT_EQ(rep.per_type.at("POS:NOUN").fp, 1u);
  EXPECT_EQ(rep.per_type.count("OTHER"), 0u);
  Counts sum;
  for (const auto& [k, c] : rep.per_type) sum += c;
  EXPECT_EQ(sum.tp, rep.tp);
  EXPECT_EQ(sum.fp, rep.fp);
  EXPECT_EQ(sum.fn, rep.fn);
}

TEST(ScoreCorpus, LargeCountsExample) {
  // 296 matched, 257 spurious and 827 missed edits: P=53.53%, R=26.36%
  std::vector<std::vector<Edit>> refs, hyps;
  for (int i = 0; i < 296; ++i) {
    refs.push_back({E(0, 1, "x")});
    hyps.push_back({E(0, 1, "x")});
  }
  for (int i = 0; i < 257; ++i) {
    refs.push_back({});
    hyps.push_back({E(1, 2, "y")});
  }
  for (int i = 0; i < 827; ++i) {
    refs.push_back({E(2, 3, "z")});
    hyps.push_back({});
  }
  auto rep = score_corpus(refs, hyps);
  EXPECT_NEAR(rep.precision, 0.5353, 5e-5);
  EXPECT_NEAR(rep.recall, 0.2636, 5e-5);
  EXPECT_NEAR(rep.f_beta, 0.4438, 1e-4);
}

TEST(ScoreCorpus, PermutationInvariant) {
  std::mt19937 rng(1);
  std::vector<std::vector<Edit>> refs, hyps;
  std::uniform_int_distribution<int> n(0, 3), pos(0, 5);
  for (int i = 0; i < 50; ++i) {
    std::vector<Edit> r, h;
    for (int k = n(rng); k > 0; --k) r.push_back(E(pos(rng), 6, "a"));
    for (int k = n(rng); k > 0; --k) h.push_back(E(pos(rng), 6, "a"));
    refs.push_back(r);
    hyps.push_back(h);
  }
  auto base = score_corpus(refs, hyps);
  std::vector<std::size_t> idx(refs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::vector<Edit>> r2, h2;
  for (auto i : idx) r2.push_back(refs[i]), h2.push_back(hyps[i]);
  auto perm = score_corpus(r2, h2);
  EXPECT_EQ(base.tp, perm.tp);
  EXPECT_EQ(base.fp, perm.fp);
  EXPECT_EQ(base.fn, perm.fn);
}

TEST(FormatReport, FourDecimals) {
  auto text = format_report(make_report(Counts{2, 1, 3}, 0.5));
  EXPECT_NE(text.find("2\t1\t3\t0.6667\t0.4000\t0.5882"), std::string::npos) << text;
  EXPECT_NE(text.find("F0.5"), std::string::npos);
}

TEST(CorpusStats, Empty) {
  auto s = corpus_stats({});
  EXPECT_EQ(s.total, 0u);
  EXPECT_EQ(percent_string(0, 0), "0.0%");
}

TEST(CorpusStats, SmallFixture) {
  std::vector<std::vector<Edit>> typed = {
      {E(0, 1, "a", ErrorType::spell()), E(2, 3, "b", ErrorType::spell())},
      {E(0, 2, "c d", ErrorType::order()), E(3, 4, "", ErrorType::other())}};
  auto s = corpus_stats(typed);
  EXPECT_EQ(s.by_group.at("SPELL"), 2u);
  EXPECT_EQ(s.by_group.at("ORDER"), 1u);
  EXPECT_EQ(s.by_group.at("OTHER"), 1u);
  EXPECT_EQ(percent_string(2, s.total), "50.0%");
  EXPECT_EQ(percent_string(1, s.total), "25.0%");
  auto text = format_stats(s);
  EXPECT_NE(text.find("SPELL\t2\t50.0%"), std::string::npos) << text;
  EXPECT_NE(text.find("ORDER\t1\t25.0%"), std::string::npos);
}

TEST(CorpusStats, TruncatedShares) {
  // per-group sums over three subcorpora
  const std::size_t pos = 3741 + 7076 + 4921, morph = 184 + 172 + 189, orth = 127 + 108 + 758,
                    spell = 780 + 797 + 1948, order = 6 + 90 + 0, other = 775 + 1438 + 1061;
  EXPECT_EQ(pos, 15738u);
  EXPECT_EQ(spell, 3525u);
  CorpusStats s;
  auto add = [&](std::size_t n, ErrorType t) {
    for (std::size_t i = 0; i < n; ++i) s.add(t);
  };
  add(pos, ErrorType::pos_of(UPos::NOUN));
  add(morph, ErrorType::morph());
  add(orth, ErrorType::orth());
  add(spell, ErrorType::spell());
  add(order, ErrorType::order());
  add(other, ErrorType::other());
  auto text = format_stats(s);
  for (const char* row : {"POS\t15738\t65.1%", "MORPH\t545\t2.2%", "ORTH\t993\t4.1%", "SPELL\t3525\t14.5%",
                          "ORDER\t96\t0.3%", "OTHER\t3274\t13.5%"})
    EXPECT_NE(text.find(row), std::string::npos) << row << "\n" << text;
}
