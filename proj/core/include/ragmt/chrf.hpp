#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ragmt::metrics {

struct ChrfParams {
  int char_order = 6;
  int word_order = 2;
  double beta = 2.0;
  // Off by default, which averages precision and recall over the orders that
  // have both hypothesis and reference n-grams (the canonical scorer's default).
  bool eps_smoothing = false;

  void validate() const;
};

/// Flattened [hyp, ref, match] counts, one triple per order: character orders
/// 1..char_order followed by word orders 1..word_order.
struct ChrfStats {
  std::vector<std::size_t> counts;

  ChrfStats& operator+=(const ChrfStats& other);
  bool operator==(const ChrfStats&) const = default;
};

// Words as chrF++ sees them: whitespace split, with one leading or trailing
// ASCII punctuation mark split off multi-character words.
std::vector<std::string> chrf_words(std::string_view s);

ChrfStats chrf_statistics(std::string_view hypothesis, std::string_view reference,
                          const ChrfParams& params = {});
double chrf_from_stats(const ChrfStats& stats, const ChrfParams& params = {});

/// Sentence-level chrF++ in [0, 100].
double chrf_pp(std::string_view hypothesis, std::string_view reference, const ChrfParams& params = {});

/// Corpus chrF++ from statistics pooled over all segments.
double corpus_chrf(std::span<const std::string> hypotheses, std::span<const std::string> references,
                   const ChrfParams& params = {});

}  // namespace ragmt::metrics
