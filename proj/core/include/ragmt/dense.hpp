#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ragmt/retrieval.hpp"

namespace ragmt::retrieval {

// Returns a copy scaled to unit L2 norm; throws on a zero or non-finite vector.
std::vector<double> unit_normalize(std::span<const double> v);

/// Row-major matrix of unit vectors, one per pair. Cosine similarity is the
/// plain dot product.
class EmbeddingIndex {
 public:
  EmbeddingIndex(std::vector<ParallelPair> pairs, const std::vector<std::vector<double>>& vectors,
                 std::string provider_fingerprint);

  std::vector<RetrievedExample> retrieve(std::span<const double> query_vector, std::size_t k) const;

  std::size_t size() const { return pairs_.size(); }
  std::size_t dimension() const { return dim_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  const std::vector<ParallelPair>& pairs() const { return pairs_; }

  nlohmann::json to_json() const;
  static EmbeddingIndex from_json(const nlohmann::json& j, std::vector<ParallelPair> pairs);

 private:
  EmbeddingIndex() = default;

  std::vector<ParallelPair> pairs_;
  std::vector<double> data_;
  std::size_t dim_ = 0;
  std::string fingerprint_;
};

/// Adapts an EmbeddingIndex to the text-query interface by embedding the query
/// with the same provider.
class DenseRetriever final : public SentenceRetriever {
 public:
  using Embedder = std::function<std::vector<double>(std::string_view)>;

  DenseRetriever(EmbeddingIndex index, Embedder embed)
      : index_(std::move(index)), embed_(std::move(embed)) {}

  std::vector<RetrievedExample> retrieve(std::string_view query, std::size_t k) const override {
    return index_.retrieve(embed_(query), k);
  }
  Strategy strategy() const override { return Strategy::Dense; }
  const EmbeddingIndex& index() const { return index_; }

 private:
  EmbeddingIndex index_;
  Embedder embed_;
};

}  // namespace ragmt::retrieval
