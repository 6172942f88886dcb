#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ragmt::metrics {

class SubwordTokenizer {
 public:
  virtual ~SubwordTokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view s) const = 0;
  virtual std::string detokenize(std::span<const std::string> tokens) const = 0;
  virtual std::string name() const = 0;
  // True when backed by an external subword model (BLEU is reported as spBLEU).
  virtual bool external() const = 0;
};

class WhitespaceTokenizer final : public SubwordTokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view s) const override;
  std::string detokenize(std::span<const std::string> tokens) const override;
  std::string name() const override { return "whitespace"; }
  bool external() const override { return false; }
};

/// Unigram segmentation from a SentencePiece-style `.vocab` file
/// (`piece<TAB>log_prob` per line). Viterbi over code points.
class UnigramTokenizer final : public SubwordTokenizer {
 public:
  UnigramTokenizer(std::vector<std::pair<std::string, double>> pieces, std::string name);
  static UnigramTokenizer load(const std::filesystem::path& path);

  std::vector<std::string> tokenize(std::string_view s) const override;
  std::string detokenize(std::span<const std::string> tokens) const override;
  std::string name() const override { return name_; }
  bool external() const override { return true; }
  std::size_t vocab_size() const { return scores_.size(); }

 private:
  std::unordered_map<std::u32string, double> scores_;
  std::size_t max_len_ = 1;
  double unk_score_ = -20.0;
  std::string name_;
};

/// BPE from a merges file (`left right` per line, rank = line order).
/// Words carry a leading U+2581 marker.
class BpeTokenizer final : public SubwordTokenizer {
 public:
  BpeTokenizer(std::vector<std::pair<std::string, std::string>> merges, std::string name);
  static BpeTokenizer load(const std::filesystem::path& path);

  std::vector<std::string> tokenize(std::string_view s) const override;
  std::string detokenize(std::span<const std::string> tokens) const override;
  std::string name() const override { return name_; }
  bool external() const override { return true; }

 private:
  std::map<std::pair<std::string, std::string>, std::size_t> ranks_;
  std::string name_;
};

/// Empty path gives the whitespace tokenizer. `.vocab` loads a unigram model,
/// anything else is read as BPE merges.
std::shared_ptr<const SubwordTokenizer> load_tokenizer(const std::filesystem::path& path);

}  // namespace ragmt::metrics
