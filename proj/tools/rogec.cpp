// rogec: command-line front end.
//
// Exit codes: 0 success, 1 data error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rogec/align.hpp"
#include "rogec/classify.hpp"
#include "rogec/m2.hpp"
#include "rogec/ngram_lm.hpp"
#include "rogec/parallel.hpp"
#include "rogec/score.hpp"
#include "rogec/synth.hpp"
#include "rogec/text_model.hpp"

namespace {

using namespace rogec;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

// Output goes to stdout unless a path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw DataError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// key=value pairs logged to stderr before a command runs.
class ConfigLog {
 public:
  explicit ConfigLog(std::string cmd) : cmd_(std::move(cmd)) {}
  template <typename T>
  ConfigLog& operator()(const std::string& key, const T& value) {
    std::ostringstream os;
    os << std::boolalpha << value;
    items_.emplace_back(key, os.str());
    return *this;
  }
  void emit() const {
    std::cerr << "rogec " << cmd_ << ":";
    for (const auto& [k, v] : items_) std::cerr << ' ' << k << '=' << v;
    std::cerr << '\n';
  }

 private:
  std::string cmd_;
  std::vector<std::pair<std::string, std::string>> items_;
};

Lexicon read_lexicon_file(const std::string& path) {
  auto in = open_in(path);
  return load_lexicon(in);
}

// ---------------------------------------------------------------------------
// extract

struct ExtractArgs {
  std::string orig, corr, output, lexicon;
  bool conllu = false;
  std::size_t threads = 1;
  CostParams costs;
};

std::vector<Edit> typed_edits(const Sentence& o, const Sentence& c, const CostParams& costs, const Lexicon* lex) {
  auto edits = extract_edits(o, c, costs);
  if (lex) {
    for (auto& e : edits) {
      try {
        e.etype = classify_edit(e, o, c, *lex);
      } catch (const MissingAnnotations&) {
        e.etype.reset();
      }
    }
  }
  return edits;
}

int run_extract(const ExtractArgs& a) {
  a.costs.validate();
  ConfigLog("extract")("orig", a.orig)("corr", a.corr)("format", a.conllu ? "conllu" : "text")(
      "lexicon", a.lexicon.empty() ? "(none)" : a.lexicon)("threads", a.threads)("w_lemma", a.costs.w_lemma)(
      "w_pos", a.costs.w_pos)("w_char", a.costs.w_char)
      .emit();
  Output out(a.output);
  auto oin = open_in(a.orig);
  auto cin = open_in(a.corr);

  if (a.conllu) {
    auto os = parse_conllu(oin);
    auto cs = parse_conllu(cin);
    if (os.size() != cs.size()) throw LengthMismatch(os.size(), cs.size());
    std::optional<Lexicon> lex;
    if (!a.lexicon.empty()) lex = read_lexicon_file(a.lexicon);
    const Lexicon empty_lex;
    std::vector<std::vector<Edit>> edits(os.size());
    parallel_for(os.size(), a.threads, [&](std::size_t i) {
      edits[i] = typed_edits(os[i], cs[i], a.costs, lex ? &*lex : &empty_lex);
    });
    for (std::size_t i = 0; i < os.size(); ++i) write_m2(out.stream(), os[i], edits[i]);
    out.finish();
    return 0;
  }

  // Plain text carries no annotations, so every edit is untyped.
  constexpr std::size_t kChunk = 4096;
  std::size_t line_no = 0;
  for (;;) {
    std::vector<std::string> ol, cl;
    std::string lo, lc;
    while (ol.size() < kChunk) {
      bool go = static_cast<bool>(std::getline(oin, lo));
      bool gc = static_cast<bool>(std::getline(cin, lc));
      if (go != gc) throw LengthMismatch(line_no + ol.size() + (go ? 1 : 0), line_no + cl.size() + (gc ? 1 : 0));
      if (!go) break;
      strip_cr(lo);
      strip_cr(lc);
      ol.push_back(std::move(lo));
      cl.push_back(std::move(lc));
    }
    if (ol.empty()) break;
    std::vector<std::string> blocks(ol.size());
    parallel_for(ol.size(), a.threads, [&](std::size_t i) {
      if (!unicode::is_valid(ol[i]) || !unicode::is_valid(cl[i])) throw LineError("invalid UTF-8", line_no + i + 1);
      Sentence o = tokenize_or_empty(ol[i]);
      Sentence c = tokenize_or_empty(cl[i]);
      std::ostringstream os;
      write_m2(os, o, typed_edits(o, c, a.costs, nullptr));
      blocks[i] = os.str();
    });
    for (const auto& b : blocks) out.stream() << b;
    line_no += ol.size();
    if (ol.size() < kChunk) break;
  }
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// score / stats

std::vector<M2Entry> read_m2_file(const std::string& path) {
  auto in = open_in(path);
  return read_m2(in);
}

std::vector<std::vector<Edit>> edits_of(const std::vector<M2Entry>& entries) {
  std::vector<std::vector<Edit>> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.edits);
  return out;
}

int run_score(const std::string& ref, const std::string& hyp, double beta, const std::string& output) {
  if (!(beta > 0)) throw UsageError("--beta must be positive");
  ConfigLog("score")("ref", ref)("hyp", hyp)("beta", beta).emit();
  auto r = read_m2_file(ref);
  auto h = read_m2_file(hyp);
  if (r.size() != h.size()) throw LengthMismatch(r.size(), h.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i].source != h[i].source) throw DataError("source sentence " + std::to_string(i + 1) + " differs");
  Output out(output);
  out.stream() << format_report(score_corpus(edits_of(r), edits_of(h), beta));
  out.finish();
  return 0;
}

int run_stats(const std::string& m2, const std::string& output) {
  ConfigLog("stats")("m2", m2).emit();
  Output out(output);
  out.stream() << format_stats(corpus_stats(edits_of(read_m2_file(m2))));
  out.finish();
  return 0;
}

// ---------------------------------------------------------------------------
// filter / synth

void add_filter_options(CLI::App* cmd, FilterConfig& f) {
  cmd->add_option("--min-words", f.min_words, "Minimum number of words")->capture_default_str();
  cmd->add_option("--diacritic-min", f.diacritic_ratio_min, "Minimum diacritic ratio")->capture_default_str();
  cmd->add_option("--foreign-max", f.foreign_char_ratio_max, "Maximum foreign-character ratio")
      ->capture_default_str();
}

void log_filter(ConfigLog& log, const FilterConfig& f) {
  log("min_words", f.min_words)("diacritic_min", f.diacritic_ratio_min)("foreign_max", f.foreign_char_ratio_max);
}

int run_filter(const std::string& input, const std::string& output, const FilterConfig& f) {
  f.validate();
  ConfigLog log("filter");
  log("input", input);
  log_filter(log, f);
  log.emit();
  auto in = open_in(input);
  Output out(output);
  std::array<std::size_t, kFilterRuleCount + 1> rejected{};
  std::size_t lines = 0, accepted = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lines;
    strip_cr(line);
    if (!unicode::is_valid(line)) throw LineError("invalid UTF-8", lines);
    auto d = filter_sentence(line, f);
    if (d.accepted()) {
      ++accepted;
      out.stream() << line << '\n';
    } else {
      ++rejected[static_cast<std::size_t>(*d.rejected_by)];
    }
  }
  out.finish();
  std::cerr << "lines=" << lines << " accepted=" << accepted;
  for (int r = 1; r <= kFilterRuleCount; ++r) std::cerr << " rule" << r << '=' << rejected[static_cast<std::size_t>(r)];
  std::cerr << '\n';
  return 0;
}

struct SynthArgs {
  std::string input, output, lexicon, confusions, stats;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::size_t max_distance = 2;
  FilterConfig filter;
  SynthConfig synth;
};

nlohmann::json stats_json(const SynthStats& s, const SynthConfig& cfg) {
  static constexpr const char* kOps[] = {"substitute", "delete", "insert", "swap"};
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["lines"] = s.lines;
  j["accepted"] = s.accepted;
  for (int r = 1; r <= kFilterRuleCount; ++r) j["rejected"]["rule" + std::to_string(r)] = s.rejected[static_cast<std::size_t>(r)];
  j["words"] = s.tally.words;
  j["changed_words"] = s.tally.changed_words;
  j["mean_changed_fraction"] = s.tally.sentences ? s.tally.changed_fraction_sum / static_cast<double>(s.tally.sentences) : 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    j["word_ops"][kOps[i]] = s.tally.word_ops[i];
    j["char_ops"][kOps[i]] = s.tally.char_ops[i];
  }
  j["empty_confusion_sets"] = s.tally.empty_confusion_sets;
  return j;
}

int run_synth(SynthArgs a) {
  if (!a.seed) throw UsageError("synth requires --seed");
  a.synth.seed = *a.seed;
  a.filter.validate();
  a.synth.validate();
  ConfigLog log("synth");
  log("input", a.input)("lexicon", a.lexicon)("confusions", a.confusions.empty() ? "(lexicon)" : a.confusions)(
      "seed", a.synth.seed)("threads", a.threads)("p_err_mean", a.synth.p_err_mean)("p_err_std", a.synth.p_err_std)(
      "p_sub", a.synth.p_sub)("p_del", a.synth.p_del)("p_ins", a.synth.p_ins)("p_swap", a.synth.p_swap)(
      "char_word_rate", a.synth.char_word_rate)("top_k", a.synth.confusion_top_k)("max_distance", a.max_distance);
  log_filter(log, a.filter);
  log.emit();

  Lexicon lex = read_lexicon_file(a.lexicon);
  auto in = open_in(a.input);
  Output out(a.output);
  PipelineOptions opts;
  opts.threads = std::max<std::size_t>(1, a.threads);
  SynthStats stats;
  if (a.confusions.empty()) {
    LexiconConfusionProvider provider(lex, a.max_distance);
    stats = generate_corpus(in, a.filter, a.synth, provider, out.stream(), opts);
  } else {
    auto cin = open_in(a.confusions);
    TableConfusionProvider provider(cin, lex);
    stats = generate_corpus(in, a.filter, a.synth, provider, out.stream(), opts);
  }
  out.finish();
  auto j = stats_json(stats, a.synth);
  if (a.stats.empty()) {
    std::cerr << j.dump() << '\n';
  } else {
    std::ofstream sf(a.stats);
    if (!sf) throw DataError("cannot open " + a.stats + " for writing");
    sf << j.dump(2) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// language model

std::vector<Sentence> read_text_sentences(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!unicode::is_valid(line)) throw LineError("invalid UTF-8", line_no);
    out.push_back(tokenize_or_empty(line));
  }
  return out;
}

int run_lm_train(const std::string& input, std::size_t order, const std::string& output) {
  if (order < 1) throw UsageError("--order must be at least 1");
  ConfigLog("lm-train")("input", input)("order", order).emit();
  auto in = open_in(input);
  NgramCounts counts(order);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!unicode::is_valid(line)) throw LineError("invalid UTF-8", line_no);
    counts.add(tokenize_or_empty(line));
  }
  if (line_no == 0) throw EmptyInput();
  TrainReport report;
  auto model = train_kneser_ney(counts, {}, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "discounts:";
  for (double d : report.discounts) std::cerr << ' ' << d;
  std::cerr << '\n';
  Output out(output);
  write_arpa(out.stream(), model);
  out.finish();
  return 0;
}

ArpaModel read_arpa_file(const std::string& path) {
  auto in = open_in(path);
  return read_arpa(in);
}

int run_lm_score(const std::string& arpa, const std::string& input, const std::string& output) {
  ConfigLog("lm-score")("arpa", arpa)("input", input).emit();
  auto model = read_arpa_file(arpa);
  auto in = open_in(input);
  auto sentences = read_text_sentences(in);
  Output out(output);
  for (const auto& s : sentences)
    out.stream() << detail::format_double(logprob(model, s)) << '\t'
                 << detail::format_double(normalized_logprob(model, s)) << '\n';
  out.finish();
  std::cerr << "sentences=" << sentences.size() << " perplexity=" << perplexity(model, sentences) << '\n';
  return 0;
}

int run_rerank(const std::string& arpa, const std::string& nbest, const RerankConfig& cfg, const std::string& output) {
  if (cfg.lm_weight < 0) throw UsageError("--lm-weight must be non-negative");
  ConfigLog("rerank")("arpa", arpa)("nbest", nbest)("lm_weight", cfg.lm_weight)("length_normalize",
                                                                                 cfg.length_normalize)
      .emit();
  auto model = read_arpa_file(arpa);
  auto in = open_in(nbest);
  auto groups = read_nbest(in);
  Output out(output);
  for (const auto& g : groups) out.stream() << render(g[rerank(g, model, cfg)].tokens) << '\n';
  out.finish();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Romanian grammatical error correction toolkit"};
  app.require_subcommand(1);
  std::string output;

  ExtractArgs ex;
  auto* c_extract = app.add_subcommand("extract", "Extract edits from parallel sentences into M2");
  c_extract->add_option("orig", ex.orig, "Original sentences (text or CoNLL-U)")->required();
  c_extract->add_option("corr", ex.corr, "Corrected sentences (text or CoNLL-U)")->required();
  c_extract->add_flag("--conllu", ex.conllu, "Inputs are CoNLL-U; edits are classified");
  c_extract->add_option("--lexicon", ex.lexicon, "Word list used by the spelling rule");
  c_extract->add_option("--threads", ex.threads, "Worker threads")->capture_default_str();
  c_extract->add_option("-o,--output", output, "Output file (default stdout)");

  std::string ref, hyp, m2;
  double beta = 0.5;
  auto* c_score = app.add_subcommand("score", "Score hypothesis M2 against reference M2");
  c_score->add_option("ref", ref, "Reference M2")->required();
  c_score->add_option("hyp", hyp, "Hypothesis M2")->required();
  c_score->add_option("--beta", beta, "F-score beta")->capture_default_str();
  c_score->add_option("-o,--output", output, "Output file (default stdout)");

  auto* c_stats = app.add_subcommand("stats", "Error-type distribution of an M2 file");
  c_stats->add_option("m2", m2, "M2 file")->required();
  c_stats->add_option("-o,--output", output, "Output file (default stdout)");

  std::string input;
  FilterConfig fcfg;
  auto* c_filter = app.add_subcommand("filter", "Keep sentences passing the corpus filter");
  c_filter->add_option("input", input, "One sentence per line")->required();
  add_filter_options(c_filter, fcfg);
  c_filter->add_option("-o,--output", output, "Output file (default stdout)");

  SynthArgs sa;
  auto* c_synth = app.add_subcommand("synth", "Generate corrupted/clean sentence pairs");
  c_synth->add_option("input", sa.input, "Clean sentences, one per line")->required();
  c_synth->add_option("--seed", sa.seed, "Random seed (required)");
  c_synth->add_option("--lexicon", sa.lexicon, "Word list (word[<TAB>freq])")->required();
  c_synth->add_option("--confusions", sa.confusions, "Precomputed suggestions (word<TAB>sugg ...)");
  c_synth->add_option("--max-distance", sa.max_distance, "Edit distance for lexicon suggestions")
      ->capture_default_str();
  c_synth->add_option("--top-k", sa.synth.confusion_top_k, "Suggestions kept per word")->capture_default_str();
  c_synth->add_option("--p-err-mean", sa.synth.p_err_mean, "Mean of the per-sentence error rate")->capture_default_str();
  c_synth->add_option("--p-err-std", sa.synth.p_err_std, "Spread of the per-sentence error rate")->capture_default_str();
  c_synth->add_option("--p-sub", sa.synth.p_sub, "Share of substitutions")->capture_default_str();
  c_synth->add_option("--p-del", sa.synth.p_del, "Share of deletions")->capture_default_str();
  c_synth->add_option("--p-ins", sa.synth.p_ins, "Share of insertions")->capture_default_str();
  c_synth->add_option("--p-swap", sa.synth.p_swap, "Share of swaps")->capture_default_str();
  c_synth->add_option("--char-rate", sa.synth.char_word_rate, "Fraction of words given character noise")
      ->capture_default_str();
  c_synth->add_option("--threads", sa.threads, "Worker threads")->capture_default_str();
  c_synth->add_option("--stats", sa.stats, "Write corruption statistics as JSON to this file");
  add_filter_options(c_synth, sa.filter);
  c_synth->add_option("-o,--output", output, "Output file (default stdout)");

  std::size_t order = 5;
  auto* c_train = app.add_subcommand("lm-train", "Train a Kneser-Ney model and write ARPA");
  c_train->add_option("input", input, "Training sentences, one per line")->required();
  c_train->add_option("--order", order, "Model order")->capture_default_str();
  c_train->add_option("-o,--output", output, "Output file (default stdout)");

  std::string arpa;
  auto* c_lmscore = app.add_subcommand("lm-score", "Score sentences with an ARPA model");
  c_lmscore->add_option("arpa", arpa, "ARPA model")->required();
  c_lmscore->add_option("input", input, "Sentences, one per line")->required();
  c_lmscore->add_option("-o,--output", output, "Output file (default stdout)");

  RerankConfig rcfg;
  std::string nbest;
  auto* c_rerank = app.add_subcommand("rerank", "Pick the best hypothesis of each N-best group");
  c_rerank->add_option("arpa", arpa, "ARPA model")->required();
  c_rerank->add_option("nbest", nbest, "Groups of sentence<TAB>score lines separated by blank lines")->required();
  c_rerank->add_option("--lm-weight", rcfg.lm_weight, "Language model weight")->capture_default_str();
  c_rerank->add_flag("--length-normalize", rcfg.length_normalize, "Divide decoder scores by length");
  c_rerank->add_option("-o,--output", output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_extract) {
      ex.output = output;
      return run_extract(ex);
    }
    if (*c_score) return run_score(ref, hyp, beta, output);
    if (*c_stats) return run_stats(m2, output);
    if (*c_filter) return run_filter(input, output, fcfg);
    if (*c_synth) {
      sa.output = output;
      return run_synth(sa);
    }
    if (*c_train) return run_lm_train(input, order, output);
    if (*c_lmscore) return run_lm_score(arpa, input, output);
    if (*c_rerank) return run_rerank(arpa, nbest, rcfg, output);
  } catch (const UsageError& e) {
    std::cerr << "rogec: " << e.what() << '\n';
    return 2;
  } catch (const LengthMismatch& e) {
    std::cerr << "rogec: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rogec: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rogec: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
