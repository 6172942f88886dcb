#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ragmt/corpus.hpp"

namespace ragmt::retrieval {

class RetrievalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Strategy { BM25, Dense, ChrfCounterweighted, FuzzyWord };

std::string_view to_string(Strategy s);
// Accepts the CLI spellings: bm25, dense, chrf-cw, fuzzy-word.
Strategy parse_strategy(std::string_view s);

struct RetrievedExample {
  ParallelPair pair;
  double score = 0.0;
  Strategy strategy = Strategy::BM25;
  // Query token that produced the match; FuzzyWord only.
  std::optional<std::string> matched_token;
};

struct RetrievedLexicon {
  LexiconEntry entry;
  double score = 1.0;
  // Empty for full-dictionary mode.
  std::string query_word;
};

// Which pairs the retrievers may draw examples from.
enum class RetrievalCorpus { NT, NTPlusGrammar };

std::string_view to_string(RetrievalCorpus c);
RetrievalCorpus parse_retrieval_corpus(std::string_view s);
std::vector<ParallelPair> retrieval_pool(std::span<const ParallelPair> pairs, RetrievalCorpus which);

/// Total order used by every retriever: score descending, then pair id ascending.
inline bool ranks_before(double score_a, std::string_view id_a, double score_b, std::string_view id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

class SentenceRetriever {
 public:
  virtual ~SentenceRetriever() = default;
  // `k` is the example budget for sentence-level strategies and the per-word
  // count `n` for FuzzyWord.
  virtual std::vector<RetrievedExample> retrieve(std::string_view query, std::size_t k) const = 0;
  virtual Strategy strategy() const = 0;
};

}  // namespace ragmt::retrieval
