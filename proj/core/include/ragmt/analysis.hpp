#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragmt/text.hpp"

namespace ragmt::analysis {

struct Vocab {
  std::set<std::string> tokens;
  std::size_t token_count = 0;
};

Vocab build_vocab(std::span<const std::string> texts, const text::WordTokenizer& tok = {});

// Token mode counts every occurrence; type mode counts distinct eval types.
enum class OovMode { Token, Type };

std::string_view to_string(OovMode m);

struct OovResult {
  double rate = 0.0;
  std::size_t oov = 0;
  std::size_t total = 0;
  OovMode mode = OovMode::Token;
  // Set when the eval side had no tokens and the rate is 0 by convention.
  bool empty_eval = false;
};

OovResult oov_rate(const Vocab& vocab, std::span<const std::string> texts,
                   const text::WordTokenizer& tok = {}, OovMode mode = OovMode::Token);

struct TermFrequencyRow {
  std::string term;
  std::string corpus_label;
  std::size_t raw_count = 0;
  std::size_t total_tokens = 0;
  double count_per_10k = 0.0;
};

struct TermFrequencyReport {
  std::vector<TermFrequencyRow> rows;
  std::string to_csv() const;
};

/// Occurrences per 10k tokens. Terms are tokenized with the same tokenizer, so
/// matching is case-insensitive; multi-word terms match contiguous token runs.
TermFrequencyReport term_frequency(std::span<const std::string> texts,
                                   std::span<const std::string> terms, std::string_view corpus_label,
                                   const text::WordTokenizer& tok = {});

}  // namespace ragmt::analysis
