#include "ragmt/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace ragmt::retrieval {

using nlohmann::json;

std::vector<double> unit_normalize(std::span<const double> v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw RetrievalError("cannot normalize a zero or non-finite embedding vector");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

EmbeddingIndex::EmbeddingIndex(std::vector<ParallelPair> pairs,
                               const std::vector<std::vector<double>>& vectors,
                               std::string provider_fingerprint)
    : pairs_(std::move(pairs)), fingerprint_(std::move(provider_fingerprint)) {
  if (vectors.size() != pairs_.size()) {
    throw RetrievalError("embedding index: " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(pairs_.size()) + " pairs");
  }
  dim_ = vectors.empty() ? 0 : vectors.front().size();
  data_.reserve(dim_ * vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim_) {
      throw RetrievalError("embedding index: row " + std::to_string(i) + " has dimension " +
                           std::to_string(vectors[i].size()) + ", expected " + std::to_string(dim_));
    }
    const auto u = unit_normalize(vectors[i]);
    data_.insert(data_.end(), u.begin(), u.end());
  }
}

std::vector<RetrievedExample> EmbeddingIndex::retrieve(std::span<const double> query_vector,
                                                       std::size_t k) const {
  if (k == 0) throw RetrievalError("dense: k must be positive");
  if (query_vector.size() != dim_) {
    throw RetrievalError("dense: query dimension " + std::to_string(query_vector.size()) +
                         " does not match index dimension " + std::to_string(dim_));
  }
  const auto q = unit_normalize(query_vector);
  std::vector<double> scores(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto r = row(i);
    double dot = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) dot += r[d] * q[d];
    scores[i] = dot;
  }
  std::vector<std::size_t> order(pairs_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return ranks_before(scores[a], pairs_[a].id, scores[b], pairs_[b].id);
                    });
  std::vector<RetrievedExample> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({pairs_[order[i]], scores[order[i]], Strategy::Dense, std::nullopt});
  }
  return out;
}

json EmbeddingIndex::to_json() const {
  json ids = json::array();
  for (const auto& p : pairs_) ids.push_back(p.id);
  return json{{"dimension", dim_}, {"fingerprint", fingerprint_}, {"ids", ids}, {"data", data_}};
}

EmbeddingIndex EmbeddingIndex::from_json(const json& j, std::vector<ParallelPair> pairs) {
  const auto dim = j.at("dimension").get<std::size_t>();
  const auto& ids = j.at("ids");
  const auto data = j.at("data").get<std::vector<double>>();
  if (ids.size() != pairs.size() || data.size() != dim * pairs.size()) {
    throw RetrievalError("embedding index: stored shape does not match corpus");
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (ids[i].get<std::string>() != pairs[i].id) {
      throw RetrievalError("embedding index: row order does not match corpus at " + pairs[i].id);
    }
  }
  // Stored rows are already unit-normalized; keep them bit-for-bit.
  EmbeddingIndex idx;
  idx.pairs_ = std::move(pairs);
  idx.data_ = data;
  idx.dim_ = dim;
  idx.fingerprint_ = j.at("fingerprint").get<std::string>();
  return idx;
}

}  // namespace ragmt::retrieval
