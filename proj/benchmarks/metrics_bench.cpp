#include <benchmark/benchmark.h>

#include "oracles.hpp"
#include "ragmt/bleu.hpp"
#include "ragmt/chrf.hpp"

using namespace ragmt;

static void BM_CorpusChrf(benchmark::State& state) {
  const auto docs = oracle::synthetic_corpus(static_cast<std::size_t>(state.range(0)), 3);
  std::vector<std::string> hyps, refs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    hyps.push_back(docs[i].source_text);
    refs.push_back(docs[(i + 1) % docs.size()].source_text);
  }
  for (auto _ : state) benchmark::DoNotOptimize(metrics::corpus_chrf(hyps, refs));
}
BENCHMARK(BM_CorpusChrf)->Arg(500);

static void BM_CorpusBleu(benchmark::State& state) {
  const auto docs = oracle::synthetic_corpus(static_cast<std::size_t>(state.range(0)), 4);
  std::vector<std::string> hyps, refs;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    hyps.push_back(docs[i].source_text);
    refs.push_back(docs[(i + 1) % docs.size()].source_text);
  }
  metrics::WhitespaceTokenizer ws;
  for (auto _ : state) benchmark::DoNotOptimize(metrics::corpus_bleu(hyps, refs, ws));
}
BENCHMARK(BM_CorpusBleu)->Arg(500);
BENCHMARK_MAIN();
