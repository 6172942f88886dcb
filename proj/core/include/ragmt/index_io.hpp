#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ragmt/bm25.hpp"
#include "ragmt/dense.hpp"

namespace ragmt::retrieval {

inline constexpr int kIndexFormatVersion = 1;

/// Identity of a persisted index. The sidecar file name is derived from all
/// fields, so a changed corpus, parameter set or embedding provider never
/// reuses a stale file.
struct IndexKey {
  Strategy strategy = Strategy::BM25;
  std::string corpus_hash;
  nlohmann::json params = nlohmann::json::object();
  std::string provider_fingerprint;

  std::string file_name() const;
};

std::filesystem::path save_index(const std::filesystem::path& dir, const IndexKey& key,
                                 const Bm25Index& index);
std::filesystem::path save_index(const std::filesystem::path& dir, const IndexKey& key,
                                 const EmbeddingIndex& index);

// nullopt when no sidecar exists for `key`; throws if the file is malformed or
// its header disagrees with the key.
std::optional<Bm25Index> load_bm25_index(const std::filesystem::path& dir, const IndexKey& key,
                                         std::vector<ParallelPair> docs);
std::optional<EmbeddingIndex> load_embedding_index(const std::filesystem::path& dir,
                                                   const IndexKey& key,
                                                   std::vector<ParallelPair> docs);

}  // namespace ragmt::retrieval
