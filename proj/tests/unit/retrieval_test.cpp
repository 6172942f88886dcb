#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "paths.hpp"
#include "ragmt/bm25.hpp"
#include "ragmt/dense.hpp"
#include "ragmt/fuzzy.hpp"
#include "ragmt/index_io.hpp"
#include "ragmt/levenshtein.hpp"

using namespace ragmt;
using namespace ragmt::retrieval;

namespace {

ParallelPair pair(std::string id, std::string src) { return {std::move(id), std::move(src), "t", Origin::NT, {}}; }

template <typename R>
void expect_same(const std::vector<R>& got, const std::vector<oracle::Hit>& want, const std::string& q) {
  ASSERT_EQ(got.size(), want.size()) << q;
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].pair.id, want[i].id) << q << " rank " << i;
    EXPECT_NEAR(got[i].score, want[i].score, 1e-12) << q;
  }
}

std::vector<std::vector<double>> random_vectors(std::size_t n, std::size_t dim, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> out(n, std::vector<double>(dim));
  for (auto& row : out) {
    for (auto& x : row) x = g(rng);
  }
  return out;
}

}  // namespace

TEST(Levenshtein, Examples) {
  EXPECT_DOUBLE_EQ(normalized_levenshtein("abc", "abc"), 1.0);
  EXPECT_NEAR(normalized_levenshtein("kitten", "sitting"), 1.0 - 3.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(normalized_levenshtein("abc", ""), 0.0);
  EXPECT_DOUBLE_EQ(normalized_levenshtein("", ""), 1.0);
  EXPECT_NEAR(normalized_levenshtein("father", "fathers"), 6.0 / 7.0, 1e-12);
  EXPECT_LT(normalized_levenshtein("mother", "xyzzy"), 0.5);
  EXPECT_DOUBLE_EQ(normalized_levenshtein("èi", "ei"), 0.5);  // code points, not bytes
}

TEST(Levenshtein, MatchesDpTable) {
  std::mt19937 rng(3);
  const std::u32string alphabet = U"abcè";
  for (int t = 0; t < 500; ++t) {
    std::u32string a, b;
    for (int i = rng() % 9; i > 0; --i) a.push_back(alphabet[rng() % alphabet.size()]);
    for (int i = rng() % 9; i > 0; --i) b.push_back(alphabet[rng() % alphabet.size()]);
    EXPECT_EQ(edit_distance(a, b), oracle::levenshtein(a, b));
  }
}

TEST(Bm25, IdenticalQueryRanksFirstAndNoMatchIsEmpty) {
  Bm25Index idx({pair("A", "alpha beta gamma"), pair("B", "delta epsilon"), pair("C", "zeta eta theta")});
  const auto r = idx.retrieve("alpha beta gamma", 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].pair.id, "A");
  EXPECT_EQ(r[0].strategy, Strategy::BM25);
  EXPECT_FALSE(r[0].matched_token);
  EXPECT_TRUE(idx.retrieve("omega", 5).empty());
  EXPECT_THROW(idx.retrieve("alpha", 0), RetrievalError);
}

TEST(Bm25, NonNegativeIdf) {
  Bm25Index idx({pair("A", "the x"), pair("B", "the y"), pair("C", "the z")});
  EXPECT_EQ(idx.df("the"), 3u);
  EXPECT_GT(idx.idf("the"), 0.0);
  EXPECT_NEAR(idx.idf("the"), std::log((3 - 3 + 0.5) / (3 + 0.5) + 1.0), 1e-15);
  EXPECT_EQ(idx.retrieve("the", 10).size(), 3u);
}

TEST(Bm25, MatchesBruteForceIncludingTies) {
  const auto docs = oracle::synthetic_corpus(300, 11);
  Bm25Index idx(docs);
  for (const auto& q : oracle::synthetic_queries(30, 12)) {
    for (std::size_t k : {1u, 10u, 50u}) expect_same(idx.retrieve(q, k), oracle::bm25(docs, q, k), q);
  }
}

TEST(Bm25, PrefixProperty) {
  const auto docs = oracle::synthetic_corpus(200, 5);
  Bm25Index idx(docs);
  const auto big = idx.retrieve("the lord said unto moses", 20);
  const auto small = idx.retrieve("the lord said unto moses", 7);
  for (std::size_t i = 0; i < small.size(); ++i) EXPECT_EQ(small[i].pair.id, big[i].pair.id);
}

TEST(Bm25, PersistedIndexScoresIdentically) {
  const auto docs = oracle::synthetic_corpus(200, 8);
  Bm25Index idx(docs, {1.2, 0.6});
  const auto dir = testing_paths::scratch("bm25_index");
  IndexKey key{Strategy::BM25, content_hash(docs), {{"k1", 1.2}, {"b", 0.6}}, ""};
  EXPECT_FALSE(load_bm25_index(dir, key, docs));
  save_index(dir, key, idx);
  const auto loaded = load_bm25_index(dir, key, docs);
  ASSERT_TRUE(loaded);
  for (const auto& q : oracle::synthetic_queries(10, 9)) {
    const auto a = idx.retrieve(q, 15);
    const auto b = loaded->retrieve(q, 15);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].pair.id, b[i].pair.id);
      EXPECT_EQ(a[i].score, b[i].score);
    }
  }
  auto other = key;
  other.params["k1"] = 1.5;
  EXPECT_NE(other.file_name(), key.file_name());
  EXPECT_FALSE(load_bm25_index(dir, other, docs));
}

TEST(Dense, RowQueryRanksFirstOrthogonalKeepsIdOrder) {
  std::vector<ParallelPair> docs = {pair("C", "c"), pair("A", "a"), pair("B", "b")};
  EmbeddingIndex idx(docs, {{0, 1, 0}, {0, 0, 2}, {0, 3, 0}}, "fp");
  auto r = idx.retrieve(std::vector<double>{0, 5, 0}, 3);
  EXPECT_EQ(r[0].pair.id, "B");  // tie at 1.0, id order
  EXPECT_EQ(r[1].pair.id, "C");
  EXPECT_NEAR(r[0].score, 1.0, 1e-12);
  r = idx.retrieve(std::vector<double>{1, 0, 0}, 3);
  EXPECT_EQ(r[0].pair.id, "A");
  EXPECT_EQ(r[1].pair.id, "B");
  EXPECT_EQ(r[2].pair.id, "C");
  EXPECT_EQ(r[0].score, 0.0);
}

TEST(Dense, DimensionMismatchNamesBoth) {
  EmbeddingIndex idx({pair("A", "a")}, {{1, 0, 0}}, "fp");
  try {
    idx.retrieve(std::vector<double>{1, 0}, 1);
    FAIL();
  } catch (const RetrievalError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
  EXPECT_THROW(EmbeddingIndex({pair("A", "a")}, {{0, 0}}, "fp"), RetrievalError);
}

TEST(Dense, StoredRowsAreUnitNorm) {
  const auto vecs = random_vectors(50, 16, 1);
  std::vector<ParallelPair> docs;
  for (int i = 0; i < 50; ++i) docs.push_back(pair("D" + std::to_string(1000 + i), "x"));
  EmbeddingIndex idx(docs, vecs, "fp");
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double n = 0;
    for (double x : idx.row(i)) n += x * x;
    EXPECT_NEAR(n, 1.0, 1e-6);
  }
}

TEST(Dense, MatchesExhaustiveOracle) {
  std::vector<ParallelPair> docs;
  auto vecs = random_vectors(400, 24, 2);
  for (int i = 0; i < 400; ++i) docs.push_back(pair("D" + std::to_string(i), "x"));
  vecs[17] = vecs[3];  // exact tie
  EmbeddingIndex idx(docs, vecs, "fp");
  const auto queries = random_vectors(20, 24, 4);
  for (const auto& q : queries) expect_same(idx.retrieve(q, 10), oracle::dense(docs, vecs, q, 10), "random");
  expect_same(idx.retrieve(vecs[3], 5), oracle::dense(docs, vecs, vecs[3], 5), "tie");
}

TEST(Dense, PersistedIndexRoundTrip) {
  std::vector<ParallelPair> docs;
  const auto vecs = random_vectors(30, 8, 6);
  for (int i = 0; i < 30; ++i) docs.push_back(pair("D" + std::to_string(i), "x"));
  EmbeddingIndex idx(docs, vecs, "embeddings:m1");
  const auto dir = testing_paths::scratch("dense_index");
  IndexKey key{Strategy::Dense, content_hash(docs), nlohmann::json::object(), "embeddings:m1"};
  save_index(dir, key, idx);
  auto loaded = load_embedding_index(dir, key, docs);
  ASSERT_TRUE(loaded);
  EXPECT_EQ(loaded->dimension(), 8u);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t d = 0; d < 8; ++d) EXPECT_EQ(loaded->row(i)[d], idx.row(i)[d]);
  }
  key.provider_fingerprint = "embeddings:m2";
  EXPECT_FALSE(load_embedding_index(dir, key, docs));
}

TEST(FuzzyWord, VerbatimWordsNOne) {
  FuzzyWordRetriever r({pair("A", "zzzz alpha qqqq"), pair("B", "bravo wwww"), pair("C", "charlie")});
  const auto res = r.retrieve_with_stats("Alpha, bravo!", 1);
  ASSERT_EQ(res.examples.size(), 2u);
  EXPECT_EQ(res.examples[0].pair.id, "A");
  EXPECT_EQ(res.examples[0].score, 1.0);
  EXPECT_EQ(*res.examples[0].matched_token, "alpha");
  EXPECT_EQ(*res.examples[1].matched_token, "bravo");
  EXPECT_EQ(res.query_tokens, 2u);
  EXPECT_EQ(res.matches_before_dedup, 2u);
}

TEST(FuzzyWord, ThresholdAndSimilarity) {
  FuzzyWordRetriever r({pair("A", "fathers"), pair("B", "xyzzy")});
  auto res = r.retrieve("father", 5);
  ASSERT_EQ(res.size(), 1u);
  EXPECT_NEAR(res[0].score, 6.0 / 7.0, 1e-12);
  EXPECT_TRUE(r.retrieve("mother", 5).size() <= 1u);
  for (const auto& e : r.retrieve("mother", 5)) EXPECT_NE(e.pair.id, "B");
  EXPECT_THROW(r.retrieve("x", 0), RetrievalError);
}

TEST(FuzzyWord, VolumeScalesWithQueryLength) {
  // 6 distinct query words, each with 12 exclusive verbatim sentences.
  std::vector<ParallelPair> docs;
  const std::vector<std::string> words = {"aaaa", "bbbb", "cccc", "dddd", "eeee", "ffff"};
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (int i = 0; i < 12; ++i) docs.push_back(pair(words[w] + std::to_string(i), words[w] + " q"));
  }
  FuzzyWordRetriever r(docs);
  const auto res = r.retrieve_with_stats("aaaa bbbb cccc dddd eeee ffff", 10);
  EXPECT_EQ(res.matches_before_dedup, 60u);
  EXPECT_EQ(res.examples.size(), 60u);
}

TEST(FuzzyWord, MatchesBruteForce) {
  const auto docs = oracle::synthetic_corpus(250, 21);
  FuzzyWordRetriever r(docs);
  for (const auto& q : oracle::synthetic_queries(15, 22)) {
    for (std::size_t n : {1u, 3u, 10u}) {
      const auto got = r.retrieve_with_stats(q, n);
      const auto want = oracle::fuzzy_word(docs, q, n);
      EXPECT_EQ(got.matches_before_dedup, want.matches_before_dedup);
      ASSERT_EQ(got.examples.size(), want.hits.size()) << q;
      for (std::size_t i = 0; i < want.hits.size(); ++i) {
        EXPECT_EQ(got.examples[i].pair.id, want.hits[i].id);
        EXPECT_EQ(got.examples[i].score, want.hits[i].score);
        EXPECT_EQ(*got.examples[i].matched_token, want.hits[i].token);
        EXPECT_GE(got.examples[i].score, 0.5);
      }
      EXPECT_LE(got.examples.size(), n * got.query_tokens);
    }
  }
}

TEST(Lexicon, ExactFirstNoPaddingFull) {
  LexiconRetriever r({{"water", std::string("noun"), "èi"}, {"waters", {}, "èi"}, {"light", {}, "kehu"}});
  auto res = r.fuzzy("Water", 5);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].entry.source_word, "water");
  EXPECT_EQ(res[0].score, 1.0);
  EXPECT_EQ(res[0].query_word, "water");
  EXPECT_TRUE(r.fuzzy("qqqqq", 3).empty());
  const auto full = r.full();
  ASSERT_EQ(full.size(), 3u);
  EXPECT_EQ(full[2].entry.source_word, "light");
  EXPECT_EQ(full[0].score, 1.0);
  EXPECT_TRUE(LexiconRetriever({}).full().empty());
}

TEST(Lexicon, FullDictionarySize) {
  std::vector<LexiconEntry> lex;
  for (int i = 0; i < 2377; ++i) lex.push_back({"w" + std::to_string(i), {}, "t"});
  LexiconRetriever r(lex);
  EXPECT_EQ(r.full().size(), 2377u);
  EXPECT_EQ(r.full()[100].entry, r.full()[100].entry);
}

TEST(Lexicon, MatchesBruteForce) {
  std::vector<LexiconEntry> lex;
  const std::vector<std::string> words = {"light", "lights", "night", "might", "sight", "water", "waters",
                                          "wafer", "earth", "heart", "hearth", "dearth", "god", "good",
                                          "gold", "sea", "see", "seed", "seeds", "lord"};
  for (std::size_t i = 0; i < words.size(); ++i) lex.push_back({words[i], i % 3 ? std::optional<std::string>("n") : std::nullopt, "t" + std::to_string(i)});
  lex.push_back({"Light", {}, "dup"});
  LexiconRetriever r(lex);
  for (const std::string q : {"light water earth", "good seed sea", "the lord god", "heart of gold"}) {
    for (std::size_t n : {1u, 3u, 100u}) {
      const auto got = r.fuzzy(q, n);
      const auto want = oracle::lexicon_fuzzy(lex, q, n);
      ASSERT_EQ(got.size(), want.size()) << q;
      for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(got[i].entry, lex[want[i].index]) << q << " " << i;
        EXPECT_EQ(got[i].score, want[i].score);
        EXPECT_EQ(got[i].query_word, want[i].token);
      }
    }
  }
}

TEST(RetrievalPool, CorpusComposition) {
  std::vector<ParallelPair> pairs = {{"A", "a", "a", Origin::NT, {}},
                                     {"G", "g", "g", Origin::Grammar, {}},
                                     {"O", "o", "o", Origin::OT, {}}};
  EXPECT_EQ(retrieval_pool(pairs, RetrievalCorpus::NT).size(), 1u);
  EXPECT_EQ(retrieval_pool(pairs, RetrievalCorpus::NTPlusGrammar).size(), 2u);
  EXPECT_EQ(parse_retrieval_corpus(to_string(RetrievalCorpus::NTPlusGrammar)), RetrievalCorpus::NTPlusGrammar);
  EXPECT_EQ(parse_strategy("chrf-cw"), Strategy::ChrfCounterweighted);
}
