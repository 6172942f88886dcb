#include <gtest/gtest.h>

#include <algorithm>
#include <nlohmann/json.hpp>
#include <random>

#include "oracles.hpp"
#include "paths.hpp"
#include "ragmt/bleu.hpp"
#include "ragmt/chrf.hpp"
#include "ragmt/eval_report.hpp"
#include "ragmt/subword.hpp"

using namespace ragmt::metrics;
using testing_paths::data;
using testing_paths::slurp;

namespace {

struct Fixture {
  std::vector<std::string> hyps, refs;
  nlohmann::json oracle;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    const auto content = slurp(data("metrics/pairs.tsv"));
    std::size_t start = 0;
    while (start < content.size()) {
      auto end = content.find('\n', start);
      if (end == std::string::npos) end = content.size();
      const auto line = content.substr(start, end - start);
      const auto tab = line.find('\t');
      x.hyps.push_back(line.substr(0, tab));
      x.refs.push_back(line.substr(tab + 1));
      start = end + 1;
    }
    x.oracle = nlohmann::json::parse(slurp(data("metrics/oracle.json")));
    return x;
  }();
  return f;
}

std::vector<std::vector<std::string>> ws_tokens(const std::vector<std::string>& xs) {
  std::vector<std::vector<std::string>> out;
  for (const auto& x : xs) out.push_back(WhitespaceTokenizer{}.tokenize(x));
  return out;
}

}  // namespace

TEST(Chrf, SentenceScoresMatchCanonicalScorer) {
  const auto& f = fixture();
  ASSERT_EQ(f.hyps.size(), 20u);
  const auto& want = f.oracle["sentence_chrf"];
  for (std::size_t i = 0; i < f.hyps.size(); ++i) {
    EXPECT_NEAR(chrf_pp(f.hyps[i], f.refs[i]), want[i].get<double>(), 0.1) << "pair " << i;
  }
}

TEST(Chrf, CorpusScoreMatchesCanonicalScorer) {
  const auto& f = fixture();
  EXPECT_NEAR(corpus_chrf(f.hyps, f.refs), f.oracle["corpus_chrf"].get<double>(), 0.1);
}

TEST(Chrf, TrivialCases) {
  EXPECT_DOUBLE_EQ(chrf_pp("In the beginning.", "In the beginning."), 100.0);
  EXPECT_DOUBLE_EQ(chrf_pp("", "non-empty"), 0.0);
  EXPECT_DOUBLE_EQ(chrf_pp("non-empty", ""), 0.0);
  const std::vector<std::string> one_h = {"a cat sat"}, one_r = {"the cat sat down"};
  EXPECT_DOUBLE_EQ(corpus_chrf(one_h, one_r), chrf_pp(one_h[0], one_r[0]));
  const std::vector<std::string> same = {"x y", "z w q"};
  EXPECT_DOUBLE_EQ(corpus_chrf(same, same), 100.0);
  EXPECT_THROW(corpus_chrf(same, one_r), std::invalid_argument);
  EXPECT_THROW(corpus_chrf(std::vector<std::string>{}, std::vector<std::string>{}), std::invalid_argument);
}

TEST(Chrf, AsymmetricAtBetaTwoSymmetricAtBetaOne) {
  const std::string a = "the cat";
  const std::string b = "the cat sat on the mat today";
  EXPECT_NE(chrf_pp(a, b), chrf_pp(b, a));
  ChrfParams p;
  p.beta = 1.0;
  EXPECT_NEAR(chrf_pp(a, b, p), chrf_pp(b, a, p), 1e-9);
}

TEST(Chrf, WordsSplitOnePunctuationMark) {
  EXPECT_EQ(chrf_words("Hello, world!"), (std::vector<std::string>{"Hello", ",", "world", "!"}));
  EXPECT_EQ(chrf_words("\"Let"), (std::vector<std::string>{"\"", "Let"}));
  EXPECT_EQ(chrf_words("a ."), (std::vector<std::string>{"a", "."}));
}

TEST(Chrf, StatsPoolAndParamsValidate) {
  auto s = chrf_statistics("ab cd", "ab ce");
  EXPECT_EQ(s.counts.size(), 3u * 8u);
  auto t = s;
  t += s;
  EXPECT_EQ(t.counts[0], 2 * s.counts[0]);
  ChrfParams bad;
  bad.char_order = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Chrf, PermutationInvariant) {
  const auto& f = fixture();
  auto h = f.hyps;
  auto r = f.refs;
  std::vector<std::size_t> idx(h.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937 rng(5);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::string> ph, pr;
  for (auto i : idx) {
    ph.push_back(h[i]);
    pr.push_back(r[i]);
  }
  EXPECT_NEAR(corpus_chrf(h, r), corpus_chrf(ph, pr), 1e-9);
  WhitespaceTokenizer ws;
  EXPECT_NEAR(corpus_bleu(h, r, ws), corpus_bleu(ph, pr, ws), 1e-9);
}

TEST(Bleu, MatchesIndependentOracleAndCanonicalScorer) {
  const auto& f = fixture();
  std::vector<std::string> h, r;
  for (const auto& i : f.oracle["bleu_pairs"]) {
    h.push_back(f.hyps[i.get<std::size_t>()]);
    r.push_back(f.refs[i.get<std::size_t>()]);
  }
  ASSERT_EQ(h.size(), 10u);
  WhitespaceTokenizer ws;
  const double got = corpus_bleu(h, r, ws);
  EXPECT_NEAR(got, oracle::bleu(ws_tokens(h), ws_tokens(r)), 0.01);
  EXPECT_NEAR(got, f.oracle["corpus_bleu"].get<double>(), 0.01);
}

TEST(Bleu, OracleAgreementOnRandomCorpora) {
  std::mt19937 rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  WhitespaceTokenizer ws;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> h, r;
    for (int s = 0; s < 5; ++s) {
      std::string hs, rs;
      for (int i = rng() % 8; i > 0; --i) hs += vocab[rng() % 6] + " ";
      for (int i = 1 + rng() % 8; i > 0; --i) rs += vocab[rng() % 6] + " ";
      h.push_back(hs);
      r.push_back(rs);
    }
    EXPECT_NEAR(corpus_bleu(h, r, ws), oracle::bleu(ws_tokens(h), ws_tokens(r)), 0.01) << trial;
  }
}

TEST(Bleu, TrivialCases) {
  WhitespaceTokenizer ws;
  const std::vector<std::string> x = {"the cat sat on the mat", "a b c d"};
  EXPECT_DOUBLE_EQ(corpus_bleu(x, x, ws), 100.0);
  const std::vector<std::string> none = {"q r s t u"};
  const std::vector<std::string> ref = {"a b c d e"};
  EXPECT_LT(corpus_bleu(none, ref, ws), 1e-6);
  EXPECT_THROW(corpus_bleu(x, ref, ws), std::invalid_argument);
  // Short hypothesis: three 4-grams of a length-6 reference, penalized.
  const double short_h = sentence_bleu("a b c d e", "a b c d e f", ws);
  EXPECT_NEAR(short_h, 100.0 * std::exp(1.0 - 6.0 / 5.0), 1e-9);
}

TEST(Bleu, StatsAreClippedAndPooled) {
  const std::vector<std::string> h = {"the", "the", "the"};
  const std::vector<std::string> r = {"the", "cat"};
  const auto s = bleu_statistics(h, r);
  EXPECT_EQ(s.correct[0], 1u);
  EXPECT_EQ(s.total[0], 3u);
  EXPECT_EQ(s.total[2], 1u);
  EXPECT_EQ(s.sys_len, 3u);
  EXPECT_EQ(s.ref_len, 2u);
}

TEST(Bleu, LabelFollowsTokenizer) {
  EXPECT_EQ(bleu_label(WhitespaceTokenizer{}), "BLEU");
  const UnigramTokenizer u({{"\xE2\x96\x81" "a", -1.0}}, "unigram:x");
  EXPECT_EQ(bleu_label(u), "spBLEU");
}

TEST(Subword, UnigramSegmentsAndRoundTrips) {
  const auto dir = testing_paths::scratch("unigram");
  const std::string model =
      "<unk>\t0\n<s>\t0\n\xE2\x96\x81the\t-1\n\xE2\x96\x81\t-2\nbegin\t-2\nning\t-2\n\xE2\x96\x81" "be\t-3\n"
      "g\t-4\ni\t-4\nn\t-4\nb\t-4\ne\t-4\n";
  testing_paths::spit(dir / "m.vocab", model);
  const auto tok = load_tokenizer(dir / "m.vocab");
  EXPECT_TRUE(tok->external());
  EXPECT_EQ(tok->name().rfind("unigram:m.vocab@", 0), 0u);
  const auto pieces = tok->tokenize("the beginning");
  EXPECT_EQ(pieces, (std::vector<std::string>{"\xE2\x96\x81the", "\xE2\x96\x81", "begin", "ning"}));
  EXPECT_EQ(tok->detokenize(pieces), "the beginning");
  EXPECT_EQ(tok->tokenize(tok->detokenize(pieces)), pieces);
  // Unknown characters still segment.
  const auto unk = tok->tokenize("thé");
  EXPECT_EQ(tok->detokenize(unk), "thé");
}

TEST(Subword, BpeMergesAndRoundTrips) {
  const auto dir = testing_paths::scratch("bpe");
  testing_paths::spit(dir / "merges.txt", "#version: 0.2\n\xE2\x96\x81 t\nh e\n\xE2\x96\x81t he\ni n\n");
  const auto tok = load_tokenizer(dir / "merges.txt");
  EXPECT_EQ(tok->name().rfind("bpe:merges.txt@", 0), 0u);
  const auto t = tok->tokenize("the in");
  // "i n" never fires: the word-initial symbol carries the marker.
  EXPECT_EQ(t, (std::vector<std::string>{"\xE2\x96\x81the", "\xE2\x96\x81i", "n"}));
  EXPECT_EQ(tok->detokenize(t), "the in");
  EXPECT_EQ(tok->tokenize(tok->detokenize(t)), t);
  EXPECT_THROW(load_tokenizer(dir / "missing.vocab"), std::runtime_error);
  EXPECT_EQ(load_tokenizer({})->name(), "whitespace");
}

TEST(EvalReport, PooledScoresRecomputeAndSerialize) {
  const auto& f = fixture();
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < f.hyps.size(); ++i) ids.push_back("S" + std::to_string(i));
  WhitespaceTokenizer ws;
  auto rep = EvalReport::build(ids, f.hyps, f.refs, ws);
  EXPECT_NEAR(rep.corpus_chrf, corpus_chrf(f.hyps, f.refs), 1e-9);
  EXPECT_NEAR(rep.corpus_bleu, corpus_bleu(f.hyps, f.refs, ws), 1e-9);
  EXPECT_EQ(rep.pooled_bleu(), rep.corpus_bleu);
  EXPECT_EQ(rep.pooled_chrf(), rep.corpus_chrf);
  EXPECT_EQ(rep.per_sentence.size(), 20u);
  EXPECT_NEAR(rep.per_sentence[3].chrf, chrf_pp(f.hyps[3], f.refs[3]), 1e-9);

  EXPECT_FALSE(rep.to_json().contains("decoding"));
  rep.decoding = {{"model", "m"}, {"temperature", 0.0}};
  const auto back = EvalReport::from_json(rep.to_json());
  EXPECT_EQ(back.to_json().dump(), rep.to_json().dump());
  EXPECT_EQ(back.decoding["model"], "m");
  EXPECT_EQ(back.corpus_bleu, rep.corpus_bleu);
  EXPECT_EQ(back.per_sentence[5].chrf_stats, rep.per_sentence[5].chrf_stats);
  EXPECT_EQ(rep.to_json()["bleu_smoothing"]["epsilon"], 1e-9);
  const auto csv = rep.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,BLEU,chrF++");
  EXPECT_EQ(rep.test_set_fingerprint, test_set_fingerprint(ids, f.refs));
}

TEST(EvalReport, TwoDecimalHelpers) {
  EXPECT_EQ(format2(35.21), "35.21");
  EXPECT_EQ(format2(7.6649), "7.66");
  EXPECT_EQ(format2(0.0), "0.00");
  EXPECT_EQ(hundredths(27.11), 2711);
  EXPECT_EQ(hundredths(35.2149), 3521);
  EXPECT_EQ(hundredths(-0.5), -50);
  EXPECT_EQ(hundredths(100.0), 10000);
}
