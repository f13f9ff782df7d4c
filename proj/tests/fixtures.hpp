// Small generated corpora and hand-made models shared by the unit tests and
// the acceptance run.
#pragma once

#include <random>
#include <string>
#include <vector>

namespace fixture {

// Skewed word choice so that count-of-counts are not degenerate.
inline std::vector<std::vector<std::string>> lm_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> vocab = {"ana", "are", "mere", "și", "pere", "de", "la",
                                                 "piață", "azi", "mâine", "merge", "cu", "ion"};
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (std::size_t i = 0; i < vocab.size(); ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
  std::discrete_distribution<std::size_t> word(weights.begin(), weights.end());
  std::uniform_int_distribution<std::size_t> len(2, 9);
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> s;
    for (std::size_t k = len(rng); k > 0; --k) s.push_back(vocab[word(rng)]);
    out.push_back(std::move(s));
  }
  return out;
}

// Unigram model without "<unk>": every score below is easy to do by hand.
inline const char* kHandArpa =
    "\\data\\\n"
    "ngram 1=4\n"
    "\n"
    "\\1-grams:\n"
    "-1\t</s>\n"
    "-99\t<s>\n"
    "-0.5\ta\n"
    "-1.5\tb\n"
    "\n"
    "\\end\\\n";

// decoder scores -1.0, -1.2, -1.3; with lm_weight 1:
//   "b"   -1.0 + (-2.5 / 2) = -2.25
//   "a"   -1.2 + (-1.5 / 2) = -1.95      best
//   "a a" -1.3 + (-2.0 / 3) = -1.9667
// with length normalisation the third wins: -0.65 - 0.6667 = -1.3167
inline const char* kHandNbest =
    "b\t-1.0\n"
    "a\t-1.2\n"
    "a a\t-1.3\n";

}  // namespace fixture
