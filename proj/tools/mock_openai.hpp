#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

namespace httplib {
class Server;
}

namespace ragmt::mock {

struct MockOptions {
  // The first `fail_first` requests get `fail_status`.
  int fail_first = 0;
  int fail_status = 429;
  std::chrono::milliseconds delay{0};
  std::size_t embedding_dim = 64;
};

/// Deterministic OpenAI-compatible endpoint. Post-edit prompts are answered
/// with the draft, direct prompts with the source; embeddings are hashed
/// character trigram counts.
class MockOpenAiServer {
 public:
  explicit MockOpenAiServer(MockOptions opts = {});
  ~MockOpenAiServer();
  MockOpenAiServer(const MockOpenAiServer&) = delete;
  MockOpenAiServer& operator=(const MockOpenAiServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  // Blocks until stop().
  void wait();

  std::string base_url() const;
  std::vector<std::string> transcript() const;
  std::size_t max_concurrent() const { return high_water_.load(); }

  static std::string reply_for(const nlohmann::json& chat_body);
  static std::vector<double> embedding_for(std::string_view text, std::size_t dim);

 private:
  MockOptions opts_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::vector<std::string> transcript_;
  std::atomic<int> served_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> high_water_{0};
};

}  // namespace ragmt::mock
