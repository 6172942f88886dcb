#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragmt/config.hpp"
#include "ragmt/corpus.hpp"
#include "ragmt/eval_report.hpp"
#include "ragmt/provider.hpp"

namespace ragmt::pipeline {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SentenceRecord {
  std::string id;
  std::string source;
  std::string reference;
  std::optional<std::string> draft;
  std::vector<std::string> retrieved_ids;
  std::vector<double> retrieved_scores;
  // Empty for none/full lexicon modes; the full lexicon is implied by the config.
  std::vector<LexiconEntry> lexicon;
  std::size_t effective_k = 0;
  std::size_t matches_before_dedup = 0;
  std::size_t query_tokens = 0;
  std::string prompt_sha256;
  std::size_t prompt_bytes = 0;
  std::string exchange_key;
  std::string completion;
  std::string hypothesis;
  double bleu = 0.0;
  double chrf = 0.0;
  std::string status = "ok";
  std::string error;

  nlohmann::json to_json() const;
  static SentenceRecord from_json(const nlohmann::json& j);
};

struct EffectiveKStats {
  double mean = 0.0;
  std::size_t min = 0;
  std::size_t max = 0;
  double mean_query_tokens = 0.0;
};

struct RunManifest {
  std::string config_fingerprint;
  std::string strategy;
  int k_or_n = 0;
  std::map<std::string, std::string> corpus_hashes;
  std::vector<SentenceRecord> records;
  EffectiveKStats effective_k;
  std::string status = "complete";

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static RunManifest load(const std::filesystem::path& path);
};

struct RunOptions {
  // Overrides the provider's HTTP transport (tests, mock endpoints).
  std::shared_ptr<provider::Transport> transport;
  provider::Provider::Logger logger;
  // Reuse completed sentences from a journal left by an interrupted run.
  bool resume = true;
  // Shared provider, e.g. across sweep cells. Takes precedence over `transport`.
  std::shared_ptr<provider::Provider> shared_provider;
};

struct RunResult {
  metrics::EvalReport report;
  RunManifest manifest;
  provider::ProviderStats provider_stats;
  std::size_t resumed = 0;
};

/// Loaded inputs of an experiment. Exposed so prompts can be regenerated
/// from a manifest.
struct ExperimentInputs {
  std::vector<ParallelPair> pool;
  std::vector<LexiconEntry> lexicon;
  std::vector<ParallelPair> test;
  std::vector<std::optional<std::string>> drafts;
  std::map<std::string, std::string> hashes;
};

ExperimentInputs load_inputs(const ExperimentConfig& config);

/// id -> draft text. Accepts `id<TAB>text` lines, or plain lines aligned with
/// `test` order.
std::vector<std::optional<std::string>> load_drafts(const std::filesystem::path& path,
                                                    const std::vector<ParallelPair>& test);

std::string config_fingerprint(const ExperimentConfig& config, const std::map<std::string, std::string>& hashes,
                               const std::string& tokenizer_name);

/// Rebuilds the prompt a record was sent with, from its retrieved ids.
prompt::RenderedPrompt rerender(const SentenceRecord& record, const ExperimentConfig& config,
                                const ExperimentInputs& inputs);

/// Validates the config, runs every test sentence, scores, and writes
/// manifest.json, report.json, report.csv and hypotheses.tsv under
/// config.output_dir. On provider failure the completed records are kept in
/// the journal and manifest (status "incomplete") and PipelineError is thrown.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace ragmt::pipeline
