#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragmt/cache.hpp"
#include "ragmt/prompt.hpp"
#include "ragmt/transport.hpp"

namespace ragmt::provider {

class ProviderError : public std::runtime_error {
 public:
  ProviderError(const std::string& what, int status = 0, int attempts = 0)
      : std::runtime_error(what), status_(status), attempts_(attempts) {}
  int status() const { return status_; }
  int attempts() const { return attempts_; }

 private:
  int status_;
  int attempts_;
};

enum class ProviderKind { OpenAI, Replay };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::OpenAI;
  std::string base_url = "http://127.0.0.1:8080/v1";
  std::string model_name = "gemini-2.5-flash";
  // Model for /embeddings; falls back to model_name when empty.
  std::string embedding_model;
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  int max_retries = 3;
  std::chrono::milliseconds request_timeout{120000};
  std::chrono::milliseconds backoff_base{1000};
  std::size_t max_in_flight = 4;
  std::size_t embed_chunk_size = 32;
  // Exchange cache. Empty disables caching.
  std::filesystem::path cache_dir;
  // Fixture directory for the replay provider (same layout as the cache).
  std::filesystem::path replay_dir;

  static ProviderConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::string& embedding_model_name() const {
    return embedding_model.empty() ? model_name : embedding_model;
  }
  // Identifies the embedding space; stored with dense indices.
  std::string embedding_fingerprint() const;
  void validate() const;
};

struct ChatRequest {
  std::string model;
  double temperature = 0.0;
  std::string system;
  std::string user;

  nlohmann::json to_json() const;
  // Hex SHA-256 of the canonical request; also the cache file stem.
  std::string cache_key() const;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
  long total_tokens = 0;
};

struct ChatExchange {
  ChatRequest request;
  std::string response_text;
  std::chrono::milliseconds latency{0};
  std::optional<TokenUsage> usage;
  bool cache_hit = false;
  int attempts = 0;
  std::string key;
};

struct EmbeddingBatch {
  std::vector<std::string> inputs;
  std::vector<std::vector<double>> vectors;
};

std::string embedding_cache_key(std::string_view model, std::string_view text);

struct ProviderStats {
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
  std::size_t max_in_flight_observed = 0;
};

/// Chat-completion and embedding client over the OpenAI-compatible wire
/// protocol. Safe to call from several threads; at most `max_in_flight`
/// requests are outstanding at any time.
class Provider {
 public:
  using Logger = std::function<void(const std::string&)>;

  // `transport` overrides the HTTP transport (tests inject scripted ones).
  explicit Provider(ProviderConfig config, std::shared_ptr<Transport> transport = nullptr);

  ChatExchange complete(const prompt::RenderedPrompt& prompt);
  ChatExchange complete(const ChatRequest& request);
  EmbeddingBatch embed(std::span<const std::string> texts);
  std::vector<double> embed_one(std::string_view text);

  const ProviderConfig& config() const { return config_; }
  ProviderStats stats() const;
  void set_logger(Logger logger) { logger_ = std::move(logger); }

 private:
  HttpResponse send(const std::string& path, const std::string& body, int& attempts);
  void log(const std::string& msg) const;
  Transport& transport();

  ProviderConfig config_;
  std::shared_ptr<Transport> transport_;
  std::once_flag transport_once_;
  std::optional<ExchangeCache> cache_;
  std::optional<ExchangeCache> replay_;
  std::counting_semaphore<1 << 16> slots_;
  Logger logger_;

  std::atomic<std::size_t> network_requests_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace ragmt::provider
