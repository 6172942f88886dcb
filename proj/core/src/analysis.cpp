#include "ragmt/analysis.hpp"

#include <sstream>
#include <stdexcept>

namespace ragmt::analysis {

Vocab build_vocab(std::span<const std::string> texts, const text::WordTokenizer& tok) {
  Vocab v;
  for (const auto& t : texts) {
    for (auto& w : tok.tokenize(t)) {
      v.tokens.insert(std::move(w));
      ++v.token_count;
    }
  }
  return v;
}

std::string_view to_string(OovMode m) { return m == OovMode::Token ? "token" : "type"; }

OovResult oov_rate(const Vocab& vocab, std::span<const std::string> texts,
                   const text::WordTokenizer& tok, OovMode mode) {
  OovResult r;
  r.mode = mode;
  std::set<std::string> types;
  for (const auto& t : texts) {
    for (auto& w : tok.tokenize(t)) {
      if (mode == OovMode::Token) {
        ++r.total;
        if (!vocab.tokens.contains(w)) ++r.oov;
      } else {
        types.insert(std::move(w));
      }
    }
  }
  if (mode == OovMode::Type) {
    r.total = types.size();
    for (const auto& w : types) {
      if (!vocab.tokens.contains(w)) ++r.oov;
    }
  }
  if (r.total == 0) {
    r.empty_eval = true;
    return r;
  }
  r.rate = static_cast<double>(r.oov) / static_cast<double>(r.total);
  return r;
}

TermFrequencyReport term_frequency(std::span<const std::string> texts,
                                   std::span<const std::string> terms, std::string_view corpus_label,
                                   const text::WordTokenizer& tok) {
  if (terms.empty()) throw std::invalid_argument("term_frequency: term list is empty");
  std::vector<std::vector<std::string>> docs;
  std::size_t total = 0;
  for (const auto& t : texts) {
    docs.push_back(tok.tokenize(t));
    total += docs.back().size();
  }
  TermFrequencyReport report;
  for (const auto& term : terms) {
    const auto needle = tok.tokenize(term);
    TermFrequencyRow row;
    row.term = term;
    row.corpus_label = std::string(corpus_label);
    row.total_tokens = total;
    if (!needle.empty()) {
      for (const auto& d : docs) {
        for (std::size_t i = 0; i + needle.size() <= d.size(); ++i) {
          if (std::equal(needle.begin(), needle.end(), d.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++row.raw_count;
          }
        }
      }
    }
    row.count_per_10k =
        total == 0 ? 0.0 : static_cast<double>(row.raw_count) * 10000.0 / static_cast<double>(total);
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string TermFrequencyReport::to_csv() const {
  std::ostringstream out;
  out << "term,corpus,raw_count,total_tokens,count_per_10k\n";
  out.setf(std::ios::fixed);
  out.precision(4);
  for (const auto& r : rows) {
    out << r.term << ',' << r.corpus_label << ',' << r.raw_count << ',' << r.total_tokens << ','
        << r.count_per_10k << '\n';
  }
  return out.str();
}

}  // namespace ragmt::analysis
