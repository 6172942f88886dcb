#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragmt/bleu.hpp"
#include "ragmt/chrf.hpp"
#include "ragmt/subword.hpp"

namespace ragmt::metrics {

struct SentenceScore {
  std::string id;
  double bleu = 0.0;
  double chrf = 0.0;
  BleuStats bleu_stats;
  ChrfStats chrf_stats;
};

/// Corpus and per-sentence scores. Corpus numbers come from the pooled
/// per-sentence statistics, so `recompute()` reproduces them exactly.
struct EvalReport {
  std::string name;
  double corpus_bleu = 0.0;
  double corpus_chrf = 0.0;
  std::string bleu_label = "BLEU";
  std::string tokenizer = "whitespace";
  double bleu_floor = kBleuFloor;
  ChrfParams chrf_params;
  std::string config_fingerprint;
  std::string test_set_fingerprint;
  // LLM decoding settings ({"model", "temperature"}); null for NMT-only runs.
  nlohmann::json decoding;
  std::vector<SentenceScore> per_sentence;

  static EvalReport build(std::span<const std::string> ids, std::span<const std::string> hypotheses,
                          std::span<const std::string> references, const SubwordTokenizer& tokenizer,
                          const ChrfParams& chrf_params = {});

  // Corpus scores from the stored statistics.
  double pooled_bleu() const;
  double pooled_chrf() const;
  void recompute();

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // Per-sentence CSV: id,bleu,chrf (2 decimals).
  std::string to_csv() const;

  void save(const std::filesystem::path& json_path) const;
  static EvalReport load(const std::filesystem::path& json_path);
};

/// Hash over the (id, reference) sequence.
std::string test_set_fingerprint(std::span<const std::string> ids, std::span<const std::string> references);

/// Two-decimal rendering used in every table.
std::string format2(double v);
/// Integer hundredths of a score, rounding half away from zero.
long hundredths(double v);

}  // namespace ragmt::metrics
