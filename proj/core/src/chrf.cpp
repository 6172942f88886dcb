#include "ragmt/chrf.hpp"

#include <stdexcept>
#include <unordered_map>

#include "ragmt/text.hpp"

namespace ragmt::metrics {

namespace {

template <typename Key>
using Counter = std::unordered_map<Key, std::size_t>;

std::vector<Counter<std::u32string>> char_ngrams(std::string_view s, int max_order) {
  std::u32string chars;
  for (char32_t cp : text::decode_utf8(s)) {
    if (!text::is_space(cp)) chars.push_back(cp);
  }
  std::vector<Counter<std::u32string>> out(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= chars.size(); ++i) ++out[len - 1][chars.substr(i, len)];
  }
  return out;
}

std::vector<Counter<std::string>> word_ngrams(std::string_view s, int max_order) {
  const auto words = chrf_words(s);
  std::vector<Counter<std::string>> out(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= words.size(); ++i) {
      std::string gram = words[i];
      for (std::size_t k = 1; k < len; ++k) gram += " " + words[i + k];
      ++out[len - 1][gram];
    }
  }
  return out;
}

template <typename Key>
void match(const Counter<Key>& hyp, const Counter<Key>& ref, std::vector<std::size_t>& out) {
  std::size_t hyp_count = 0;
  std::size_t ref_count = 0;
  std::size_t matches = 0;
  for (const auto& [g, c] : hyp) {
    hyp_count += c;
    if (auto it = ref.find(g); it != ref.end()) matches += std::min(c, it->second);
  }
  for (const auto& [g, c] : ref) ref_count += c;
  // The canonical scorer reports no hypothesis n-grams when the reference has none.
  out.push_back(ref.empty() ? 0 : hyp_count);
  out.push_back(ref_count);
  out.push_back(matches);
}

}  // namespace

void ChrfParams::validate() const {
  if (char_order < 1) throw std::invalid_argument("chrF: char_order must be >= 1");
  if (word_order < 0) throw std::invalid_argument("chrF: word_order must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("chrF: beta must be > 0");
}

ChrfStats& ChrfStats::operator+=(const ChrfStats& other) {
  if (counts.empty()) counts.assign(other.counts.size(), 0);
  if (counts.size() != other.counts.size()) throw std::invalid_argument("chrF: statistics shape mismatch");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

std::vector<std::string> chrf_words(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& w : text::split_whitespace(s)) {
    const auto cps = text::decode_utf8(w);
    if (cps.size() == 1) {
      out.push_back(w);
    } else if (text::is_ascii_punct(cps.back())) {
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(0, cps.size() - 1)));
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(cps.size() - 1)));
    } else if (text::is_ascii_punct(cps.front())) {
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(0, 1)));
      out.push_back(text::encode_utf8(std::u32string_view(cps).substr(1)));
    } else {
      out.push_back(w);
    }
  }
  return out;
}

ChrfStats chrf_statistics(std::string_view hypothesis, std::string_view reference,
                          const ChrfParams& params) {
  params.validate();
  ChrfStats stats;
  stats.counts.reserve(3 * static_cast<std::size_t>(params.char_order + params.word_order));
  const auto hc = char_ngrams(hypothesis, params.char_order);
  const auto rc = char_ngrams(reference, params.char_order);
  for (std::size_t n = 0; n < hc.size(); ++n) match(hc[n], rc[n], stats.counts);
  if (params.word_order > 0) {
    const auto hw = word_ngrams(hypothesis, params.word_order);
    const auto rw = word_ngrams(reference, params.word_order);
    for (std::size_t n = 0; n < hw.size(); ++n) match(hw[n], rw[n], stats.counts);
  }
  return stats;
}

double chrf_from_stats(const ChrfStats& stats, const ChrfParams& params) {
  params.validate();
  const auto orders = static_cast<std::size_t>(params.char_order + params.word_order);
  if (stats.counts.size() != 3 * orders) throw std::invalid_argument("chrF: statistics shape mismatch");
  constexpr double eps = 1e-16;
  const double factor = params.beta * params.beta;
  double score = 0.0;
  double avg_prec = 0.0;
  double avg_rec = 0.0;
  std::size_t effective = 0;
  for (std::size_t i = 0; i < orders; ++i) {
    const auto n_hyp = static_cast<double>(stats.counts[3 * i]);
    const auto n_ref = static_cast<double>(stats.counts[3 * i + 1]);
    const auto n_match = static_cast<double>(stats.counts[3 * i + 2]);
    const double prec = n_hyp > 0 ? n_match / n_hyp : eps;
    const double rec = n_ref > 0 ? n_match / n_ref : eps;
    const double denom = factor * prec + rec;
    score += denom > 0 ? (1 + factor) * prec * rec / denom : eps;
    if (n_hyp > 0 && n_ref > 0) {
      avg_prec += prec;
      avg_rec += rec;
      ++effective;
    }
  }
  if (params.eps_smoothing) return 100.0 * score / static_cast<double>(orders);
  if (effective == 0) return 0.0;
  avg_prec /= static_cast<double>(effective);
  avg_rec /= static_cast<double>(effective);
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100.0 * (1 + factor) * avg_prec * avg_rec / (factor * avg_prec + avg_rec);
}

double chrf_pp(std::string_view hypothesis, std::string_view reference, const ChrfParams& params) {
  return chrf_from_stats(chrf_statistics(hypothesis, reference, params), params);
}

double corpus_chrf(std::span<const std::string> hypotheses, std::span<const std::string> references,
                   const ChrfParams& params) {
  if (hypotheses.size() != references.size()) {
    throw std::invalid_argument("chrF: " + std::to_string(hypotheses.size()) + " hypotheses vs " +
                                std::to_string(references.size()) + " references");
  }
  if (hypotheses.empty()) throw std::invalid_argument("chrF: empty corpus");
  ChrfStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    total += chrf_statistics(hypotheses[i], references[i], params);
  }
  return chrf_from_stats(total, params);
}

}  // namespace ragmt::metrics
