#pragma once

#include <chrono>
#include <map>
#include <string>

namespace ragmt::provider {

struct HttpResponse {
  // 0 when the request never produced an HTTP status (connect failure, timeout).
  int status = 0;
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  // `path` is relative to the base URL, e.g. "/chat/completions".
  virtual HttpResponse post_json(const std::string& path, const std::string& body) = 0;
};

struct BaseUrl {
  std::string scheme_host_port;  // "https://api.example.com:443"
  std::string path_prefix;       // "/v1"

  static BaseUrl parse(const std::string& url);
};

/// cpp-httplib transport. A fresh client per request keeps it thread-safe.
class HttpTransport final : public Transport {
 public:
  HttpTransport(const std::string& base_url, std::string api_key, std::chrono::milliseconds timeout);
  HttpResponse post_json(const std::string& path, const std::string& body) override;

 private:
  BaseUrl base_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

}  // namespace ragmt::provider
