#include "ragmt/retrieval.hpp"

#include "ragmt/text.hpp"

namespace ragmt::retrieval {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::BM25: return "bm25";
    case Strategy::Dense: return "dense";
    case Strategy::ChrfCounterweighted: return "chrf-cw";
    case Strategy::FuzzyWord: return "fuzzy-word";
  }
  return "bm25";
}

Strategy parse_strategy(std::string_view s) {
  const auto l = text::lowercase(s);
  if (l == "bm25") return Strategy::BM25;
  if (l == "dense" || l == "bge") return Strategy::Dense;
  if (l == "chrf-cw" || l == "chrf_cw" || l == "chrf") return Strategy::ChrfCounterweighted;
  if (l == "fuzzy-word" || l == "fuzzy_word" || l == "word") return Strategy::FuzzyWord;
  throw RetrievalError("unknown retrieval strategy '" + std::string(s) + "'");
}

std::string_view to_string(RetrievalCorpus c) {
  return c == RetrievalCorpus::NT ? "nt" : "nt+grammar";
}

RetrievalCorpus parse_retrieval_corpus(std::string_view s) {
  const auto l = text::lowercase(s);
  if (l == "nt") return RetrievalCorpus::NT;
  if (l == "nt+grammar" || l == "nt_plus_grammar") return RetrievalCorpus::NTPlusGrammar;
  throw RetrievalError("unknown retrieval corpus '" + std::string(s) + "' (expected nt or nt+grammar)");
}

std::vector<ParallelPair> retrieval_pool(std::span<const ParallelPair> pairs, RetrievalCorpus which) {
  std::vector<ParallelPair> out;
  for (const auto& p : pairs) {
    if (p.origin == Origin::NT || (which == RetrievalCorpus::NTPlusGrammar && p.origin == Origin::Grammar)) {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace ragmt::retrieval
