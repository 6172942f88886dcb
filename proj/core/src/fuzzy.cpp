#include "ragmt/fuzzy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ragmt/levenshtein.hpp"

namespace ragmt::retrieval {

namespace {

// Similarity if it can reach the threshold, otherwise -1. A length gap larger
// than half the longer string already forces the distance past the threshold.
double thresholded_similarity(std::u32string_view a, std::u32string_view b) {
  const auto longest = std::max(a.size(), b.size());
  const auto gap = longest - std::min(a.size(), b.size());
  if (longest > 0 && static_cast<double>(gap) > (1.0 - kFuzzyThreshold) * static_cast<double>(longest)) {
    return -1.0;
  }
  const double s = normalized_levenshtein(a, b);
  return s >= kFuzzyThreshold ? s : -1.0;
}

}  // namespace

std::vector<std::string> query_tokens(std::string_view query, const text::WordTokenizer& tok) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& t : tok.tokenize(query)) {
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

FuzzyWordRetriever::FuzzyWordRetriever(std::vector<ParallelPair> pairs) : pairs_(std::move(pairs)) {
  std::unordered_map<std::string, std::uint32_t> type_ids;
  doc_types_.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : tokenizer_.tokenize(p.source_text)) {
      auto [it, inserted] = type_ids.emplace(t, static_cast<std::uint32_t>(types_.size()));
      if (inserted) types_.push_back(text::decode_utf8(t));
      ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    doc_types_.push_back(std::move(ids));
  }
}

FuzzyWordResult FuzzyWordRetriever::retrieve_with_stats(std::string_view query, std::size_t n) const {
  if (n == 0) throw RetrievalError("fuzzy-word: n must be positive");
  FuzzyWordResult result;
  const auto tokens = query_tokens(query, tokenizer_);
  result.query_tokens = tokens.size();

  struct Best {
    double score;
    std::size_t token;
  };
  std::map<std::size_t, Best> merged;  // doc -> best match
  std::vector<double> type_sim(types_.size());
  std::vector<std::size_t> hits;

  for (std::size_t ti = 0; ti < tokens.size(); ++ti) {
    const auto q = text::decode_utf8(tokens[ti]);
    for (std::size_t t = 0; t < types_.size(); ++t) type_sim[t] = thresholded_similarity(q, types_[t]);

    std::vector<double> doc_sim(pairs_.size(), -1.0);
    hits.clear();
    for (std::size_t d = 0; d < pairs_.size(); ++d) {
      double best = -1.0;
      for (auto t : doc_types_[d]) best = std::max(best, type_sim[t]);
      if (best >= kFuzzyThreshold) {
        doc_sim[d] = best;
        hits.push_back(d);
      }
    }
    const auto take = std::min(n, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(),
                      [&](std::size_t a, std::size_t b) {
                        return ranks_before(doc_sim[a], pairs_[a].id, doc_sim[b], pairs_[b].id);
                      });
    result.matches_before_dedup += take;
    for (std::size_t i = 0; i < take; ++i) {
      const auto d = hits[i];
      auto [it, inserted] = merged.emplace(d, Best{doc_sim[d], ti});
      if (!inserted && doc_sim[d] > it->second.score) it->second = {doc_sim[d], ti};
    }
  }

  std::vector<std::pair<std::size_t, Best>> rows(merged.begin(), merged.end());
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    return ranks_before(a.second.score, pairs_[a.first].id, b.second.score, pairs_[b.first].id);
  });
  result.examples.reserve(rows.size());
  for (const auto& [d, best] : rows) {
    result.examples.push_back({pairs_[d], best.score, Strategy::FuzzyWord, tokens[best.token]});
  }
  return result;
}

LexiconRetriever::LexiconRetriever(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  keys_.reserve(entries_.size());
  for (const auto& e : entries_) keys_.push_back(text::decode_utf8(text::lowercase(e.source_word)));
}

std::vector<RetrievedLexicon> LexiconRetriever::fuzzy(std::string_view query, std::size_t n) const {
  if (n == 0) throw RetrievalError("lexicon: n must be positive");
  auto before = [&](double sa, std::size_t a, double sb, std::size_t b) {
    if (sa != sb) return sa > sb;
    if (entries_[a].source_word != entries_[b].source_word) {
      return entries_[a].source_word < entries_[b].source_word;
    }
    return a < b;
  };

  const auto tokens = query_tokens(query, tokenizer_);
  std::map<std::size_t, std::pair<double, std::size_t>> merged;  // entry -> (score, token)
  std::vector<double> sim(entries_.size());
  std::vector<std::size_t> hits;
  for (std::size_t ti = 0; ti < tokens.size(); ++ti) {
    const auto q = text::decode_utf8(tokens[ti]);
    hits.clear();
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      sim[e] = thresholded_similarity(q, keys_[e]);
      if (sim[e] >= kFuzzyThreshold) hits.push_back(e);
    }
    const auto take = std::min(n, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(),
                      [&](std::size_t a, std::size_t b) { return before(sim[a], a, sim[b], b); });
    for (std::size_t i = 0; i < take; ++i) {
      const auto e = hits[i];
      auto [it, inserted] = merged.emplace(e, std::make_pair(sim[e], ti));
      if (!inserted && sim[e] > it->second.first) it->second = {sim[e], ti};
    }
  }
  std::vector<std::pair<std::size_t, std::pair<double, std::size_t>>> rows(merged.begin(), merged.end());
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    return before(a.second.first, a.first, b.second.first, b.first);
  });
  std::vector<RetrievedLexicon> out;
  out.reserve(rows.size());
  for (const auto& [e, st] : rows) out.push_back({entries_[e], st.first, tokens[st.second]});
  return out;
}

std::vector<RetrievedLexicon> LexiconRetriever::full() const {
  std::vector<RetrievedLexicon> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back({e, 1.0, {}});
  return out;
}

}  // namespace ragmt::retrieval
