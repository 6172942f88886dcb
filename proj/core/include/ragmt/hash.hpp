#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace ragmt {

/// Incremental SHA-256 producing lowercase hex digests. Used for cache keys,
/// corpus fingerprints and index sidecar names.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::string_view data);
  // Length-prefixed field so that ("ab","c") and ("a","bc") hash differently.
  Sha256& field(std::string_view data);
  std::string hex();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string sha256_hex(std::string_view data);

}  // namespace ragmt
