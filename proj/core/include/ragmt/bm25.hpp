#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ragmt/retrieval.hpp"
#include "ragmt/text.hpp"

namespace ragmt::retrieval {

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

/// Okapi BM25 over the source side with the non-negative IDF
/// ln((N - df + 0.5) / (df + 0.5) + 1). Every query token occurrence
/// contributes, and documents with zero score are not returned.
class Bm25Index final : public SentenceRetriever {
 public:
  struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
  };

  Bm25Index(std::vector<ParallelPair> docs, Bm25Params params = {});

  std::vector<RetrievedExample> retrieve(std::string_view query, std::size_t k) const override;
  Strategy strategy() const override { return Strategy::BM25; }

  double score(std::string_view query, std::size_t doc) const;
  double idf(const std::string& term) const;
  std::size_t df(const std::string& term) const;

  std::size_t size() const { return docs_.size(); }
  double avgdl() const { return avgdl_; }
  const Bm25Params& params() const { return params_; }
  const std::vector<ParallelPair>& docs() const { return docs_; }

  nlohmann::json to_json() const;
  // Rebuilds from persisted statistics; `docs` must be the corpus the index was built on.
  static Bm25Index from_json(const nlohmann::json& j, std::vector<ParallelPair> docs);

 private:
  Bm25Index() = default;
  double term_weight(double idf, std::uint32_t tf, std::size_t doc) const;

  std::vector<ParallelPair> docs_;
  std::vector<std::uint32_t> doc_len_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
  Bm25Params params_;
  text::WordTokenizer tokenizer_;
};

}  // namespace ragmt::retrieval
