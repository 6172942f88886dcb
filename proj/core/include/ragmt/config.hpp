#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragmt/bm25.hpp"
#include "ragmt/chrf.hpp"
#include "ragmt/chrf_cw.hpp"
#include "ragmt/prompt.hpp"
#include "ragmt/provider.hpp"
#include "ragmt/retrieval.hpp"

namespace ragmt::pipeline {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { NmtOnly, DirectLlm, PostEdit };
enum class ContextMode { None, StaticK, BM25, Dense, ChrfCw, FuzzyWord };
enum class LexiconMode { None, FuzzyN, Full };

std::string_view to_string(RunMode m);
std::string_view to_string(ContextMode m);
std::string_view to_string(LexiconMode m);
RunMode parse_run_mode(std::string_view s);
ContextMode parse_context_mode(std::string_view s);
LexiconMode parse_lexicon_mode(std::string_view s);

struct TestSelector {
  std::string book = "Genesis";
  int verses = 500;
};

struct ExperimentConfig {
  std::string name;
  RunMode mode = RunMode::PostEdit;
  ContextMode context = ContextMode::None;
  // k for sentence strategies, n (matches per word) for FUZZY_WORD.
  int k = 0;
  std::optional<std::uint64_t> static_seed;
  LexiconMode lexicon_mode = LexiconMode::None;
  int lexicon_n = 0;
  retrieval::RetrievalCorpus retrieval_corpus = retrieval::RetrievalCorpus::NT;
  retrieval::Bm25Params bm25;
  retrieval::ChrfCwParams chrf_cw;
  metrics::ChrfParams chrf;

  // Parallel corpus holding NT (and optionally GRAMMAR) retrieval pairs.
  std::filesystem::path corpus;
  std::filesystem::path lexicon;
  // Test pairs (source + reference). When empty, OT pairs of `test_selector`
  // are taken from `corpus`.
  std::filesystem::path test;
  TestSelector test_selector;
  // NMT drafts: `id<TAB>text` per line, or one line per test pair in order.
  std::filesystem::path drafts;
  std::filesystem::path tokenizer_model;
  std::filesystem::path output_dir = "runs/default";
  // Retrieval index sidecars; defaults to <output_dir>/../indices.
  std::filesystem::path index_dir;

  std::optional<provider::ProviderConfig> provider;
  prompt::LanguageProfile language;

  /// Relative paths are resolved against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Throws ConfigError on any invariant violation. No I/O.
  void validate() const;

  std::filesystem::path effective_index_dir() const;
  // Label used in tables: "bm25", "fuzzy-word", "lexicon-fuzzy", ...
  std::string strategy_label() const;
};

/// Named configurations: nmt-only, direct-0shot, direct-5shot,
/// postedit-0shot, postedit-5shot, bm25, dense, chrf-cw, fuzzy-word,
/// lexicon-fuzzy, lexicon-full, final.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace ragmt::pipeline
