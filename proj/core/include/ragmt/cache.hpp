#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace ragmt::provider {

/// One JSON document per exchange, named `<hex content hash>.json`. Writes go
/// through a temp file and rename so readers never see partial files.
class ExchangeCache {
 public:
  explicit ExchangeCache(std::filesystem::path dir);

  std::optional<nlohmann::json> load(const std::string& key) const;
  void store(const std::string& key, const nlohmann::json& doc);
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::mutex write_mu_;
};

}  // namespace ragmt::provider
