// Deterministic OpenAI-compatible endpoint for offline runs and fixture recording.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "mock_openai.hpp"

namespace {
ragmt::mock::MockOpenAiServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mock chat/embedding endpoint"};
  std::string host = "127.0.0.1";
  int port = 8080;
  ragmt::mock::MockOptions opts;
  int delay_ms = 0;
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port, "0 picks a free port")->capture_default_str();
  app.add_option("--fail-first", opts.fail_first, "Answer the first N requests with --fail-status");
  app.add_option("--fail-status", opts.fail_status)->capture_default_str();
  app.add_option("--delay-ms", delay_ms, "Per-request delay");
  app.add_option("--dim", opts.embedding_dim, "Embedding dimension")->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  opts.delay = std::chrono::milliseconds(delay_ms);

  ragmt::mock::MockOpenAiServer server(opts);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    server.start(host, port);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  std::cout << server.base_url() << std::endl;
  server.wait();
  return 0;
}
