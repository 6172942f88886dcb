#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ragmt/retrieval.hpp"

namespace ragmt::retrieval {

struct ChrfCwParams {
  int min_order = 2;
  int max_order = 6;
  // Residual weight multiplier applied to a query n-gram each time a selected
  // example covers it. 1.0 disables counterweighting.
  double gamma = 0.5;
};

/// Character n-gram multiset of a text after lowercasing and removing
/// whitespace.
class CharNgramProfile {
 public:
  CharNgramProfile(std::string_view text, int min_order, int max_order);

  // Distinct n-grams in first-occurrence order (shorter orders first).
  const std::vector<std::u32string>& distinct() const { return distinct_; }
  std::size_t count(const std::u32string& gram) const;
  // Multiset size: sum over orders of max(len - n + 1, 0).
  std::size_t total() const { return total_; }

 private:
  std::vector<std::u32string> distinct_;
  std::unordered_map<std::u32string, std::size_t> counts_;
  std::size_t total_ = 0;
};

/// Greedy diversity-aware selection. Each query n-gram g carries a weight
/// w(g), initially 1. A candidate scores sum_{g shared} w(g) / |candidate
/// n-grams|; after a pick, w(g) *= gamma for every g it shares with the
/// query. With gamma < 1, a candidate whose source text is byte-identical to
/// an already selected one is only taken once no other candidate has a
/// positive score. Selection stops when no candidate scores above zero.
class ChrfCounterweightedRetriever final : public SentenceRetriever {
 public:
  ChrfCounterweightedRetriever(std::vector<ParallelPair> pairs, ChrfCwParams params = {});

  std::vector<RetrievedExample> retrieve(std::string_view query, std::size_t k) const override;
  Strategy strategy() const override { return Strategy::ChrfCounterweighted; }

  // Plain normalized n-gram overlap (all weights 1).
  double overlap(std::string_view query, std::size_t candidate) const;

  const ChrfCwParams& params() const { return params_; }
  const std::vector<ParallelPair>& pairs() const { return pairs_; }

 private:
  std::vector<ParallelPair> pairs_;
  ChrfCwParams params_;
  std::vector<std::size_t> gram_totals_;
  // Distinct n-gram -> candidates containing it (ascending).
  std::unordered_map<std::u32string, std::vector<std::uint32_t>> postings_;
};

}  // namespace ragmt::retrieval
