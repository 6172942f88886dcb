#include "ragmt/bleu.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ragmt::metrics {

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuOrder; ++n) {
    correct[n] += other.correct[n];
    total[n] += other.total[n];
  }
  sys_len += other.sys_len;
  ref_len += other.ref_len;
  return *this;
}

BleuStats bleu_statistics(std::span<const std::string> hyp_tokens, std::span<const std::string> ref_tokens) {
  using Gram = std::vector<std::string>;
  auto count = [](std::span<const std::string> toks, std::size_t n) {
    std::map<Gram, std::size_t> c;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) ++c[Gram(toks.begin() + i, toks.begin() + i + n)];
    return c;
  };
  BleuStats s;
  s.sys_len = hyp_tokens.size();
  s.ref_len = ref_tokens.size();
  for (std::size_t n = 1; n <= kBleuOrder; ++n) {
    const auto hyp = count(hyp_tokens, n);
    const auto ref = count(ref_tokens, n);
    for (const auto& [g, c] : hyp) {
      s.total[n - 1] += c;
      if (auto it = ref.find(g); it != ref.end()) s.correct[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& s, double floor) {
  if (s.sys_len == 0) return 0.0;
  bool any = false;
  for (auto c : s.correct) any = any || c > 0;
  if (!any) return 0.0;
  int effective = 0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (s.total[n] == 0) break;
    ++effective;
    const double num = s.correct[n] > 0 ? static_cast<double>(s.correct[n]) : floor;
    log_sum += std::log(num / static_cast<double>(s.total[n]));
  }
  const double bp = s.sys_len < s.ref_len
                        ? std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.sys_len))
                        : 1.0;
  return std::min(100.0, 100.0 * bp * std::exp(log_sum / effective));
}

double sentence_bleu(const std::string& hypothesis, const std::string& reference,
                     const SubwordTokenizer& tokenizer) {
  const auto h = tokenizer.tokenize(hypothesis);
  const auto r = tokenizer.tokenize(reference);
  return bleu_from_stats(bleu_statistics(h, r));
}

double corpus_bleu(std::span<const std::string> hypotheses, std::span<const std::string> references,
                   const SubwordTokenizer& tokenizer) {
  if (hypotheses.size() != references.size()) {
    throw std::invalid_argument("BLEU: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw std::invalid_argument("BLEU: empty corpus");
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto h = tokenizer.tokenize(hypotheses[i]);
    const auto r = tokenizer.tokenize(references[i]);
    total += bleu_statistics(h, r);
  }
  return bleu_from_stats(total);
}

std::string bleu_label(const SubwordTokenizer& tokenizer) { return tokenizer.external() ? "spBLEU" : "BLEU"; }

}  // namespace ragmt::metrics
