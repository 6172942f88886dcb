#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ragmt/retrieval.hpp"
#include "ragmt/text.hpp"

namespace ragmt::retrieval {

inline constexpr double kFuzzyThreshold = 0.5;

struct FuzzyWordResult {
  std::vector<RetrievedExample> examples;
  // Matches summed over query tokens before deduplication by pair id.
  std::size_t matches_before_dedup = 0;
  std::size_t query_tokens = 0;
};

/// Word-level retrieval with a dynamic example count. For each distinct query
/// token, sentences are ranked by the best normalized Levenshtein similarity
/// between the token and any of their tokens; the top-n with similarity >= 0.5
/// are kept. Results are merged by pair id (highest score wins, first query
/// token on ties) and ordered by score, then id.
class FuzzyWordRetriever final : public SentenceRetriever {
 public:
  explicit FuzzyWordRetriever(std::vector<ParallelPair> pairs);

  std::vector<RetrievedExample> retrieve(std::string_view query, std::size_t n) const override {
    return retrieve_with_stats(query, n).examples;
  }
  FuzzyWordResult retrieve_with_stats(std::string_view query, std::size_t n) const;
  Strategy strategy() const override { return Strategy::FuzzyWord; }

  const std::vector<ParallelPair>& pairs() const { return pairs_; }

 private:
  std::vector<ParallelPair> pairs_;
  std::vector<std::u32string> types_;
  // Distinct type ids per sentence.
  std::vector<std::vector<std::uint32_t>> doc_types_;
  text::WordTokenizer tokenizer_;
};

/// Lexicon retrieval: fuzzy top-n entries per query token, or the whole
/// dictionary.
class LexiconRetriever {
 public:
  explicit LexiconRetriever(std::vector<LexiconEntry> entries);

  std::vector<RetrievedLexicon> fuzzy(std::string_view query, std::size_t n) const;
  std::vector<RetrievedLexicon> full() const;

  const std::vector<LexiconEntry>& entries() const { return entries_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<std::u32string> keys_;
  text::WordTokenizer tokenizer_;
};

// Distinct tokens of `query` in first-occurrence order.
std::vector<std::string> query_tokens(std::string_view query, const text::WordTokenizer& tok = {});

}  // namespace ragmt::retrieval
