#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "ragmt/chrf_cw.hpp"

using namespace ragmt;
using namespace ragmt::retrieval;

namespace {
ParallelPair pair(std::string id, std::string src) { return {std::move(id), std::move(src), "t", Origin::NT, {}}; }
}  // namespace

TEST(CharNgramProfile, CountsAfterSqueeze) {
  CharNgramProfile p("Ab c", 2, 3);  // "abc": ab bc abc
  EXPECT_EQ(p.total(), 3u);
  EXPECT_EQ(p.distinct().size(), 3u);
  EXPECT_EQ(p.count(U"bc"), 1u);
  CharNgramProfile q("aaaa", 2, 2);
  EXPECT_EQ(q.total(), 3u);
  EXPECT_EQ(q.distinct().size(), 1u);
  const CharNgramProfile long_profile("in the beginning", 2, 6);
  for (const auto& g : long_profile.distinct()) {
    EXPECT_GE(g.size(), 2u);
    EXPECT_LE(g.size(), 6u);
  }
}

TEST(ChrfCw, KOneIsPlainOverlapTopOne) {
  const auto pool = oracle::synthetic_corpus(300, 31);
  ChrfCounterweightedRetriever r(pool);
  for (const auto& q : oracle::synthetic_queries(25, 32)) {
    const auto got = r.retrieve(q, 1);
    std::vector<oracle::Hit> plain;
    for (const auto& p : pool) plain.push_back({p.id, oracle::chrf_overlap(p, q), {}});
    std::sort(plain.begin(), plain.end(), oracle::before);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(got[0].pair.id, plain[0].id) << q;
    EXPECT_NEAR(got[0].score, plain[0].score, 1e-12);
    EXPECT_NEAR(r.overlap(q, 0), oracle::chrf_overlap(pool[0], q), 1e-12);
  }
}

TEST(ChrfCw, GammaOneIsRankEquivalentToPlainScorer) {
  const auto pool = oracle::synthetic_corpus(200, 41);
  ChrfCounterweightedRetriever r(pool, {2, 6, 1.0});
  for (const auto& q : oracle::synthetic_queries(50, 42)) {
    const auto got = r.retrieve(q, 10);
    std::vector<oracle::Hit> plain;
    for (const auto& p : pool) {
      const double s = oracle::chrf_overlap(p, q);
      if (s > 0) plain.push_back({p.id, s, {}});
    }
    std::sort(plain.begin(), plain.end(), oracle::before);
    plain.resize(std::min<std::size_t>(10, plain.size()));
    ASSERT_EQ(got.size(), plain.size());
    for (std::size_t i = 0; i < plain.size(); ++i) EXPECT_EQ(got[i].pair.id, plain[i].id) << q;
  }
}

TEST(ChrfCw, MatchesNaiveGreedyLoop) {
  const auto pool = oracle::synthetic_corpus(10, 51);
  for (double gamma : {0.0, 0.3, 0.5, 1.0}) {
    ChrfCounterweightedRetriever r(pool, {2, 6, gamma});
    for (const auto& q : oracle::synthetic_queries(10, 52)) {
      const auto got = r.retrieve(q, 3);
      const auto want = oracle::chrf_cw_greedy(pool, q, 3, gamma);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_EQ(got[i].pair.id, want[i].id);
        EXPECT_EQ(got[i].score, want[i].score);
      }
    }
  }
  const auto big = oracle::synthetic_corpus(400, 53);
  ChrfCounterweightedRetriever r(big);
  for (const auto& q : oracle::synthetic_queries(10, 54)) {
    const auto got = r.retrieve(q, 20);
    const auto want = oracle::chrf_cw_greedy(big, q, 20, 0.5);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(got[i].pair.id, want[i].id);
  }
}

TEST(ChrfCw, TwoIdenticalAndOneDistinct) {
  // Hand trace, gamma = 0.5. Query "abcd" has 2..6-grams ab bc cd abc bcd abcd.
  // A1 = A2 = "abcd": 6/6 = 1.0. B = "abxy": shares only "ab", 1/6.
  // After A1: every weight is 0.5, so A2 scores 0.5 and B 0.5/6. A2 would win
  // on score alone, but it repeats A1's text and is deferred.
  std::vector<ParallelPair> pool = {pair("A1", "abcd"), pair("A2", "abcd"), pair("B", "abxy")};
  ChrfCounterweightedRetriever r(pool, {2, 6, 0.5});
  const auto got = r.retrieve("abcd", 2);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].pair.id, "A1");
  EXPECT_DOUBLE_EQ(got[0].score, 1.0);
  EXPECT_EQ(got[1].pair.id, "B");
  EXPECT_DOUBLE_EQ(got[1].score, 0.5 / 6.0);
  // With the budget to spare the duplicate is still taken last.
  const auto three = r.retrieve("abcd", 3);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[2].pair.id, "A2");
}

TEST(ChrfCw, NoByteIdenticalPairWhileDistinctCandidateScores) {
  const auto pool = oracle::synthetic_corpus(300, 61);
  ChrfCounterweightedRetriever r(pool);
  std::size_t dup_picks = 0;
  for (const auto& q : oracle::synthetic_queries(50, 62)) {
    const auto got = r.retrieve(q, pool.size());
    std::set<std::string> texts, ids;
    for (const auto& e : got) {
      if (texts.contains(e.pair.source_text)) {
        // At a duplicate pick, no unselected new text may still overlap the query.
        ++dup_picks;
        for (const auto& p : pool) {
          if (ids.contains(p.id) || texts.contains(p.source_text)) continue;
          EXPECT_EQ(oracle::chrf_overlap(p, q), 0.0) << q;
        }
      }
      texts.insert(e.pair.source_text);
      ids.insert(e.pair.id);
    }
  }
  EXPECT_GT(dup_picks, 0u);
}

TEST(ChrfCw, ErrorsAndStopsAtZero) {
  ChrfCounterweightedRetriever r({pair("A", "abc"), pair("B", "xyz")});
  EXPECT_THROW(r.retrieve("", 2), RetrievalError);
  EXPECT_THROW(r.retrieve("   ", 2), RetrievalError);
  EXPECT_THROW(r.retrieve("abc", 0), RetrievalError);
  EXPECT_EQ(r.retrieve("abc", 5).size(), 1u);
  EXPECT_THROW(ChrfCounterweightedRetriever({}, {2, 6, 1.5}), RetrievalError);
}

TEST(ChrfCw, PrefixProperty) {
  const auto pool = oracle::synthetic_corpus(150, 71);
  ChrfCounterweightedRetriever r(pool);
  const auto q = pool[5].source_text;
  const auto a = r.retrieve(q, 12);
  const auto b = r.retrieve(q, 5);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(a[i].pair.id, b[i].pair.id);
}
