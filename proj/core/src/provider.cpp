#include "ragmt/provider.hpp"

#include <cstdlib>
#include <thread>
#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "ragmt/dense.hpp"
#include "ragmt/hash.hpp"

namespace ragmt::provider {

using nlohmann::json;
using namespace std::chrono_literals;

namespace {

bool retryable(const HttpResponse& r) { return r.status == 0 || r.status == 429 || r.status >= 500; }

std::string describe(const HttpResponse& r) {
  if (r.status == 0) return "transport error: " + r.error;
  std::string body = r.body.size() > 300 ? r.body.substr(0, 300) + "..." : r.body;
  return "HTTP " + std::to_string(r.status) + ": " + body;
}

// Holds one in-flight slot and tracks the high-water mark.
class SlotGuard {
 public:
  SlotGuard(std::counting_semaphore<1 << 16>& sem, std::atomic<std::size_t>& in_flight,
            std::atomic<std::size_t>& high_water)
      : sem_(sem), in_flight_(in_flight) {
    sem_.acquire();
    const auto now = in_flight_.fetch_add(1) + 1;
    auto prev = high_water.load();
    while (now > prev && !high_water.compare_exchange_weak(prev, now)) {
    }
  }
  ~SlotGuard() {
    in_flight_.fetch_sub(1);
    sem_.release();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1 << 16>& sem_;
  std::atomic<std::size_t>& in_flight_;
};

}  // namespace

ProviderConfig ProviderConfig::from_json(const json& j) {
  ProviderConfig c;
  if (j.contains("kind")) {
    const auto k = j.at("kind").get<std::string>();
    if (k == "openai") {
      c.kind = ProviderKind::OpenAI;
    } else if (k == "replay") {
      c.kind = ProviderKind::Replay;
    } else {
      throw ProviderError("unknown provider kind '" + k + "' (expected openai or replay)");
    }
  }
  c.base_url = j.value("base_url", c.base_url);
  c.model_name = j.value("model_name", c.model_name);
  c.embedding_model = j.value("embedding_model", c.embedding_model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.temperature = j.value("temperature", c.temperature);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.request_timeout = std::chrono::milliseconds(j.value("request_timeout_ms", c.request_timeout.count()));
  c.backoff_base = std::chrono::milliseconds(j.value("backoff_base_ms", c.backoff_base.count()));
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.embed_chunk_size = j.value("embed_chunk_size", c.embed_chunk_size);
  c.cache_dir = j.value("cache_dir", std::string{});
  c.replay_dir = j.value("replay_dir", std::string{});
  c.validate();
  return c;
}

json ProviderConfig::to_json() const {
  return json{{"kind", kind == ProviderKind::OpenAI ? "openai" : "replay"},
              {"base_url", base_url},
              {"model_name", model_name},
              {"embedding_model", embedding_model},
              {"api_key_env", api_key_env},
              {"temperature", temperature},
              {"max_retries", max_retries},
              {"request_timeout_ms", request_timeout.count()},
              {"backoff_base_ms", backoff_base.count()},
              {"max_in_flight", max_in_flight},
              {"embed_chunk_size", embed_chunk_size},
              {"cache_dir", cache_dir.string()},
              {"replay_dir", replay_dir.string()}};
}

std::string ProviderConfig::embedding_fingerprint() const {
  return "embeddings:" + embedding_model_name();
}

void ProviderConfig::validate() const {
  if (temperature < 0.0) throw ProviderError("temperature must be >= 0");
  if (max_in_flight < 1) throw ProviderError("max_in_flight must be >= 1");
  if (max_retries < 0) throw ProviderError("max_retries must be >= 0");
  if (embed_chunk_size < 1) throw ProviderError("embed_chunk_size must be >= 1");
  if (model_name.empty()) throw ProviderError("model_name is empty");
  if (kind == ProviderKind::Replay && replay_dir.empty()) {
    throw ProviderError("replay provider requires replay_dir");
  }
}

json ChatRequest::to_json() const {
  return json{{"kind", "chat"}, {"model", model}, {"temperature", temperature}, {"system", system},
              {"user", user}};
}

std::string ChatRequest::cache_key() const { return sha256_hex(to_json().dump()); }

std::string embedding_cache_key(std::string_view model, std::string_view text) {
  return sha256_hex(json{{"kind", "embedding"}, {"model", model}, {"input", text}}.dump());
}

Provider::Provider(ProviderConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      slots_(static_cast<std::ptrdiff_t>(config_.max_in_flight)) {
  config_.validate();
  if (!config_.cache_dir.empty()) cache_.emplace(config_.cache_dir);
  if (config_.kind == ProviderKind::Replay) replay_.emplace(config_.replay_dir);
}

ProviderStats Provider::stats() const {
  return {network_requests_.load(), cache_hits_.load(), retries_.load(), max_in_flight_.load()};
}

void Provider::log(const std::string& msg) const {
  if (logger_) logger_(msg);
}

Transport& Provider::transport() {
  std::call_once(transport_once_, [&] {
    if (transport_) return;
    std::string key;
    if (!config_.api_key_env.empty()) {
      const char* v = std::getenv(config_.api_key_env.c_str());
      if (v == nullptr || *v == '\0') {
        throw ProviderError("environment variable " + config_.api_key_env + " is not set");
      }
      key = v;
    }
    transport_ = std::make_shared<HttpTransport>(config_.base_url, key, config_.request_timeout);
  });
  if (!transport_) throw ProviderError("no transport available");
  return *transport_;
}

HttpResponse Provider::send(const std::string& path, const std::string& body, int& attempts) {
  auto& t = transport();
  HttpResponse last;
  const int max_attempts = 1 + config_.max_retries;
  for (attempts = 1; attempts <= max_attempts; ++attempts) {
    {
      SlotGuard slot(slots_, in_flight_, max_in_flight_);
      ++network_requests_;
      last = t.post_json(path, body);
    }
    if (last.status >= 200 && last.status < 300) return last;
    if (!retryable(last)) {
      throw ProviderError(path + " failed with non-retryable " + describe(last), last.status, attempts);
    }
    log(path + " attempt " + std::to_string(attempts) + "/" + std::to_string(max_attempts) +
        " failed: " + describe(last));
    if (attempts == max_attempts) break;
    ++retries_;
    std::this_thread::sleep_for(config_.backoff_base * (1LL << (attempts - 1)));
  }
  throw ProviderError(path + " failed after " + std::to_string(max_attempts) + " attempts; last " +
                          describe(last),
                      last.status, max_attempts);
}

ChatExchange Provider::complete(const prompt::RenderedPrompt& prompt) {
  return complete(ChatRequest{config_.model_name, config_.temperature, prompt.system, prompt.user});
}

ChatExchange Provider::complete(const ChatRequest& request) {
  ChatExchange ex;
  ex.request = request;
  ex.key = request.cache_key();

  auto from_doc = [&](const json& doc) {
    ex.response_text = doc.at("response_text").get<std::string>();
    if (doc.contains("usage") && doc["usage"].is_object()) {
      const auto& u = doc["usage"];
      ex.usage = TokenUsage{u.value("prompt_tokens", 0L), u.value("completion_tokens", 0L),
                            u.value("total_tokens", 0L)};
    }
    ex.cache_hit = true;
    ++cache_hits_;
  };

  if (replay_) {
    auto doc = replay_->load(ex.key);
    if (!doc) throw ProviderError("no replay fixture for chat request " + ex.key);
    from_doc(*doc);
    return ex;
  }
  if (cache_) {
    if (auto doc = cache_->load(ex.key)) {
      from_doc(*doc);
      return ex;
    }
  }

  const json body{{"model", request.model},
                  {"messages",
                   json::array({{{"role", "system"}, {"content", request.system}},
                                {{"role", "user"}, {"content", request.user}}})},
                  {"temperature", request.temperature}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = send("/chat/completions", body.dump(), ex.attempts);
  ex.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  if (ex.attempts > 1) log("chat request " + ex.key.substr(0, 12) + " succeeded after " +
                           std::to_string(ex.attempts) + " attempts");

  json reply;
  try {
    reply = json::parse(res.body);
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    ex.response_text = content.is_string() ? content.get<std::string>() : std::string{};
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed chat completion response: ") + e.what(), res.status,
                        ex.attempts);
  }
  if (ex.response_text.empty()) throw ProviderError("empty response", res.status, ex.attempts);
  if (reply.contains("usage") && reply["usage"].is_object()) {
    const auto& u = reply["usage"];
    ex.usage = TokenUsage{u.value("prompt_tokens", 0L), u.value("completion_tokens", 0L),
                          u.value("total_tokens", 0L)};
  }
  if (cache_) {
    json doc{{"request", request.to_json()}, {"response_text", ex.response_text}};
    if (ex.usage) {
      doc["usage"] = {{"prompt_tokens", ex.usage->prompt_tokens},
                      {"completion_tokens", ex.usage->completion_tokens},
                      {"total_tokens", ex.usage->total_tokens}};
    }
    cache_->store(ex.key, doc);
  }
  return ex;
}

EmbeddingBatch Provider::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw ProviderError("embed: no input texts");
  const auto& model = config_.embedding_model_name();
  std::unordered_map<std::string, std::vector<double>> found;
  std::vector<std::string> missing;
  std::unordered_set<std::string> missing_set;
  std::optional<std::size_t> dim;

  auto check_dim = [&](std::size_t d) {
    if (!dim) dim = d;
    if (*dim != d) {
      throw ProviderError("embedding dimension mismatch: " + std::to_string(d) + " vs " +
                          std::to_string(*dim));
    }
  };

  for (const auto& t : texts) {
    if (found.contains(t)) continue;
    const auto key = embedding_cache_key(model, t);
    std::optional<json> doc;
    if (replay_) {
      doc = replay_->load(key);
      if (!doc) throw ProviderError("no replay fixture for embedding of '" + t.substr(0, 60) + "'");
    } else if (cache_) {
      doc = cache_->load(key);
    }
    if (doc) {
      auto v = doc->at("embedding").get<std::vector<double>>();
      check_dim(v.size());
      found.emplace(t, std::move(v));
      ++cache_hits_;
    } else if (missing_set.insert(t).second) {
      missing.push_back(t);
    }
  }

  for (std::size_t start = 0; start < missing.size(); start += config_.embed_chunk_size) {
    const auto end = std::min(missing.size(), start + config_.embed_chunk_size);
    const std::vector<std::string> chunk(missing.begin() + static_cast<std::ptrdiff_t>(start),
                                         missing.begin() + static_cast<std::ptrdiff_t>(end));
    int attempts = 0;
    const auto res = send("/embeddings", json{{"model", model}, {"input", chunk}}.dump(), attempts);
    std::vector<std::vector<double>> vecs(chunk.size());
    try {
      const auto reply = json::parse(res.body);
      const auto& data = reply.at("data");
      if (data.size() != chunk.size()) {
        throw ProviderError("embeddings response has " + std::to_string(data.size()) +
                            " rows for " + std::to_string(chunk.size()) + " inputs");
      }
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto idx = data[i].value("index", i);
        if (idx >= chunk.size()) throw ProviderError("embeddings response index out of range");
        vecs[idx] = data[i].at("embedding").get<std::vector<double>>();
      }
    } catch (const json::exception& e) {
      throw ProviderError(std::string("malformed embeddings response: ") + e.what(), res.status, attempts);
    }
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      check_dim(vecs[i].size());
      auto unit = retrieval::unit_normalize(vecs[i]);
      if (cache_) {
        cache_->store(embedding_cache_key(model, chunk[i]),
                      json{{"request", {{"kind", "embedding"}, {"model", model}, {"input", chunk[i]}}},
                           {"embedding", unit}});
      }
      found.emplace(chunk[i], std::move(unit));
    }
  }

  EmbeddingBatch batch;
  batch.inputs.assign(texts.begin(), texts.end());
  batch.vectors.reserve(texts.size());
  for (const auto& t : texts) batch.vectors.push_back(found.at(t));
  return batch;
}

std::vector<double> Provider::embed_one(std::string_view text) {
  const std::string t(text);
  return embed(std::span<const std::string>(&t, 1)).vectors.front();
}

}  // namespace ragmt::provider
