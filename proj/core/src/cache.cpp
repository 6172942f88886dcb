#include "ragmt/cache.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace ragmt::provider {

namespace fs = std::filesystem;

ExchangeCache::ExchangeCache(fs::path dir) : dir_(std::move(dir)) {}

fs::path ExchangeCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<nlohmann::json> ExchangeCache::load(const std::string& key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupt cache entry " + path.string() + ": " + e.what());
  }
}

void ExchangeCache::store(const std::string& key, const nlohmann::json& doc) {
  std::lock_guard lock(write_mu_);
  fs::create_directories(dir_);
  const auto path = path_for(key);
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const auto tmp = fs::path(path.string() + "." + tid.str() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    out << doc.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

}  // namespace ragmt::provider
