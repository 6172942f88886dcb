#include "ragmt/index_io.hpp"

#include <fstream>

#include "ragmt/hash.hpp"

namespace ragmt::retrieval {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json header(const IndexKey& key) {
  return json{{"format", "ragmt-index"},
              {"version", kIndexFormatVersion},
              {"strategy", to_string(key.strategy)},
              {"corpus_hash", key.corpus_hash},
              {"params", key.params},
              {"provider_fingerprint", key.provider_fingerprint}};
}

fs::path write_sidecar(const fs::path& dir, const IndexKey& key, json index) {
  fs::create_directories(dir);
  auto doc = header(key);
  doc["index"] = std::move(index);
  const auto path = dir / key.file_name();
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw RetrievalError("cannot write index " + tmp.string());
    out << doc.dump();
  }
  fs::rename(tmp, path);
  return path;
}

std::optional<json> read_sidecar(const fs::path& dir, const IndexKey& key) {
  const auto path = dir / key.file_name();
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw RetrievalError("index " + path.string() + " is malformed: " + e.what());
  }
  auto expected = header(key);
  for (const auto& [field, value] : expected.items()) {
    if (!doc.contains(field) || doc[field] != value) {
      throw RetrievalError("index " + path.string() + " does not match its key (field '" + field + "')");
    }
  }
  return doc.at("index");
}

}  // namespace

std::string IndexKey::file_name() const {
  Sha256 h;
  h.field(std::to_string(kIndexFormatVersion))
      .field(to_string(strategy))
      .field(corpus_hash)
      .field(params.dump())
      .field(provider_fingerprint);
  return std::string(to_string(strategy)) + "-" + h.hex().substr(0, 16) + ".json";
}

fs::path save_index(const fs::path& dir, const IndexKey& key, const Bm25Index& index) {
  return write_sidecar(dir, key, index.to_json());
}

fs::path save_index(const fs::path& dir, const IndexKey& key, const EmbeddingIndex& index) {
  return write_sidecar(dir, key, index.to_json());
}

std::optional<Bm25Index> load_bm25_index(const fs::path& dir, const IndexKey& key,
                                         std::vector<ParallelPair> docs) {
  auto j = read_sidecar(dir, key);
  if (!j) return std::nullopt;
  return Bm25Index::from_json(*j, std::move(docs));
}

std::optional<EmbeddingIndex> load_embedding_index(const fs::path& dir, const IndexKey& key,
                                                   std::vector<ParallelPair> docs) {
  auto j = read_sidecar(dir, key);
  if (!j) return std::nullopt;
  return EmbeddingIndex::from_json(*j, std::move(docs));
}

}  // namespace ragmt::retrieval
