#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ragmt/subword.hpp"

namespace ragmt::metrics {

inline constexpr int kBleuOrder = 4;
inline constexpr double kBleuFloor = 1e-9;

struct BleuStats {
  std::array<std::size_t, kBleuOrder> correct{};
  std::array<std::size_t, kBleuOrder> total{};
  std::size_t sys_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  bool operator==(const BleuStats&) const = default;
};

BleuStats bleu_statistics(std::span<const std::string> hyp_tokens, std::span<const std::string> ref_tokens);

/// Floor smoothing for zero-match orders; orders with no hypothesis n-grams
/// are dropped from the geometric mean.
double bleu_from_stats(const BleuStats& stats, double floor = kBleuFloor);

double sentence_bleu(const std::string& hypothesis, const std::string& reference,
                     const SubwordTokenizer& tokenizer);
double corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                   const SubwordTokenizer& tokenizer);

/// "spBLEU" for external subword models, "BLEU" otherwise.
std::string bleu_label(const SubwordTokenizer& tokenizer);

}  // namespace ragmt::metrics
