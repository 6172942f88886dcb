#include "mock_openai.hpp"

#include <httplib.h>

#include <cmath>

#include "ragmt/prompt.hpp"
#include "ragmt/text.hpp"

namespace ragmt::mock {

using nlohmann::json;

MockOpenAiServer::MockOpenAiServer(MockOptions opts)
    : opts_(opts), server_(std::make_unique<httplib::Server>()) {
  auto track = [this](const std::string& path, auto&& body) {
    const auto now = in_flight_.fetch_add(1) + 1;
    auto prev = high_water_.load();
    while (now > prev && !high_water_.compare_exchange_weak(prev, now)) {
    }
    {
      std::lock_guard lock(mu_);
      transcript_.push_back(path);
    }
    if (opts_.delay.count() > 0) std::this_thread::sleep_for(opts_.delay);
    body();
    in_flight_.fetch_sub(1);
  };

  server_->Post(R"(.*/chat/completions)", [this, track](const httplib::Request& req, httplib::Response& res) {
    track(req.path, [&] {
      if (served_.fetch_add(1) < opts_.fail_first) {
        res.status = opts_.fail_status;
        res.set_content(R"({"error":{"message":"scripted failure"}})", "application/json");
        return;
      }
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        res.status = 400;
        return;
      }
      const json out{{"id", "mock"},
                     {"object", "chat.completion"},
                     {"model", body.value("model", "")},
                     {"choices",
                      json::array({{{"index", 0},
                                    {"message", {{"role", "assistant"}, {"content", reply_for(body)}}},
                                    {"finish_reason", "stop"}}})},
                     {"usage", {{"prompt_tokens", 0}, {"completion_tokens", 0}, {"total_tokens", 0}}}};
      res.set_content(out.dump(), "application/json");
    });
  });

  server_->Post(R"(.*/embeddings)", [this, track](const httplib::Request& req, httplib::Response& res) {
    track(req.path, [&] {
      if (served_.fetch_add(1) < opts_.fail_first) {
        res.status = opts_.fail_status;
        return;
      }
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        res.status = 400;
        return;
      }
      json data = json::array();
      std::size_t i = 0;
      for (const auto& t : body.at("input")) {
        data.push_back({{"object", "embedding"},
                        {"index", i++},
                        {"embedding", embedding_for(t.get<std::string>(), opts_.embedding_dim)}});
      }
      res.set_content(json{{"object", "list"}, {"data", data}, {"model", body.value("model", "")}}.dump(),
                      "application/json");
    });
  });
}

MockOpenAiServer::~MockOpenAiServer() { stop(); }

int MockOpenAiServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw std::runtime_error("mock server cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockOpenAiServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void MockOpenAiServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string MockOpenAiServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/v1";
}

std::vector<std::string> MockOpenAiServer::transcript() const {
  std::lock_guard lock(mu_);
  return transcript_;
}

std::string MockOpenAiServer::reply_for(const json& chat_body) {
  std::string user;
  for (const auto& m : chat_body.value("messages", json::array())) {
    if (m.value("role", "") == "user") user = m.value("content", "");
  }
  try {
    const auto parsed = prompt::parse_user(user);
    if (parsed.draft) return *parsed.draft;
    return parsed.source;
  } catch (const prompt::PromptError&) {
    return user.empty() ? "ok" : user;
  }
}

std::vector<double> MockOpenAiServer::embedding_for(std::string_view s, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  const auto cps = text::decode_utf8(" " + text::lowercase(s) + " ");
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t k = 0; k < 3; ++k) {
      h ^= cps[i + k];
      h *= 1099511628211ull;
    }
    v[h % dim] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace ragmt::mock
