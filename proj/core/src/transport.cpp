#include "ragmt/transport.hpp"

#include <httplib.h>

#include <stdexcept>

namespace ragmt::provider {

BaseUrl BaseUrl::parse(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("base_url lacks a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw std::invalid_argument("base_url scheme must be http or https: " + url);
  }
  const auto host_start = scheme_end + 3;
  const auto slash = url.find('/', host_start);
  BaseUrl out;
  out.scheme_host_port = url.substr(0, slash);
  if (slash != std::string::npos) {
    out.path_prefix = url.substr(slash);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  if (out.scheme_host_port.size() <= host_start) throw std::invalid_argument("base_url lacks a host: " + url);
  return out;
}

HttpTransport::HttpTransport(const std::string& base_url, std::string api_key,
                             std::chrono::milliseconds timeout)
    : base_(BaseUrl::parse(base_url)), api_key_(std::move(api_key)), timeout_(timeout) {}

HttpResponse HttpTransport::post_json(const std::string& path, const std::string& body) {
  httplib::Client client(base_.scheme_host_port);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(base_.path_prefix + path, headers, body, "application/json");
  HttpResponse out;
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

}  // namespace ragmt::provider
