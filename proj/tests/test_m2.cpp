#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rogec/m2.hpp"

using namespace rogec;

namespace {

std::string to_m2(const Sentence& o, const std::vector<Edit>& edits) {
  std::ostringstream os;
  write_m2(os, o, edits);
  return os.str();
}

std::vector<M2Entry> parse(const std::string& text) {
  std::istringstream in(text);
  return read_m2(in);
}

}  // namespace

TEST(M2, NoopLine) {
  EXPECT_EQ(to_m2(make_sentence({"Ana", "are", "mere"}), {}),
            "S Ana are mere\nA -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n\n");
}

TEST(M2, MorphEdit) {
  auto o = make_sentence({"în", "cazul", "unei", "paciente", "internată", "joi"});
  auto c = make_sentence({"în", "cazul", "unei", "paciente", "internate", "joi"});
  auto edits = extract_edits(o, c);
  ASSERT_EQ(edits.size(), 1u);
  edits[0].etype = ErrorType::morph();
  EXPECT_EQ(to_m2(o, edits),
            "S în cazul unei paciente internată joi\n"
            "A 4 5|||MORPH|||internate|||REQUIRED|||-NONE-|||0\n\n");
}

TEST(M2, UntypedAndDeletion) {
  auto o = make_sentence({"a", "b"});
  Edit del{{1, 2}, {1, 1}, "b", "", std::nullopt};
  EXPECT_EQ(to_m2(o, {del}), "S a b\nA 1 2|||UNK||||||REQUIRED|||-NONE-|||0\n\n");
}

TEST(M2, RoundTripProperty) {
  std::mt19937_64 rng(9);
  const std::vector<std::string> vocab = {"a", "b", "c", ",", "Ana", "mere", "ș"};
  const std::vector<std::optional<ErrorType>> types = {std::nullopt, ErrorType::spell(), ErrorType::order(),
                                                       ErrorType::pos_form(UPos::ADJ), ErrorType::pos_of(UPos::PUNCT)};
  std::uniform_int_distribution<std::size_t> len(1, 8), w(0, vocab.size() - 1), t(0, types.size() - 1);
  std::vector<M2Entry> entries;
  std::string text;
  for (int iter = 0; iter < 500; ++iter) {
    Sentence o, c;
    for (std::size_t k = len(rng); k > 0; --k) o.tokens.emplace_back(vocab[w(rng)]);
    for (std::size_t k = len(rng); k > 0; --k) c.tokens.emplace_back(vocab[w(rng)]);
    auto edits = extract_edits(o, c);
    for (auto& e : edits) e.etype = types[t(rng)];
    entries.push_back({o, edits});
    text += to_m2(o, edits);
  }
  auto back = parse(text);
  ASSERT_EQ(back.size(), entries.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], entries[i]) << i;
  std::string again;
  for (const auto& e : back) again += to_m2(e.source, e.edits);
  EXPECT_EQ(again, text);
}

TEST(M2, ReadsNoneAsDeletionAndSortsEdits) {
  auto entries = parse(
      "S a b c\n"
      "A 2 3|||OTHER|||-NONE-|||REQUIRED|||-NONE-|||0\n"
      "A 0 1|||SPELL|||x y|||REQUIRED|||-NONE-|||0\n");
  ASSERT_EQ(entries.size(), 1u);
  ASSERT_EQ(entries[0].edits.size(), 2u);
  EXPECT_EQ(entries[0].edits[0].c_text, "x y");
  EXPECT_EQ(entries[0].edits[0].c_span, (Span{0, 2}));
  EXPECT_EQ(entries[0].edits[1].c_text, "");
  EXPECT_EQ(entries[0].edits[1].o_text, "c");
  EXPECT_EQ(entries[0].edits[1].c_span, (Span{3, 3}));
  EXPECT_EQ(entries[0].edits[1].etype, ErrorType::other());
}

TEST(M2, UnknownLabelIsUntyped) {
  auto entries = parse("S a\nA 0 1|||R:NOUN|||b|||REQUIRED|||-NONE-|||0\n\n");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_FALSE(entries[0].edits[0].etype);
}

TEST(M2, Malformed) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse(text);
    } catch (const MalformedM2& e) {
      return e.line_no();
    }
    return 0;
  };
  EXPECT_EQ(line_of("A 0 1|||X|||b|||REQUIRED|||-NONE-|||0\n"), 1u);        // no S line
  EXPECT_EQ(line_of("S a\nA 0 1|||X|||b|||REQUIRED\n"), 2u);                 // too few fields
  EXPECT_EQ(line_of("S a\nA 0 5|||X|||b|||REQUIRED|||-NONE-|||0\n"), 2u);   // span past end
  EXPECT_EQ(line_of("S a\nA z 1|||X|||b|||REQUIRED|||-NONE-|||0\n"), 2u);   // bad number
  EXPECT_EQ(line_of("S a\nQ\n"), 2u);
}

TEST(M2, EmptyInput) { EXPECT_TRUE(parse("").empty()); }
