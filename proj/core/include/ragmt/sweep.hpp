#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragmt/config.hpp"
#include "ragmt/eval_report.hpp"
#include "ragmt/pipeline.hpp"

namespace ragmt::pipeline {

enum class SweepAxis { K, LexiconN };

struct SweepRow {
  std::string strategy;
  int k_or_n = 0;
  double effective_k_mean = 0.0;
  double bleu = 0.0;
  double chrf = 0.0;
  std::string status = "ok";
  std::string error;
  std::size_t provider_requests = 0;
  std::filesystem::path output_dir;
};

struct SweepTable {
  std::string bleu_label = "BLEU";
  std::vector<SweepRow> rows;

  // strategy,k_or_n,effective_k_mean,<BLEU label>,chrF++,status
  std::string to_csv() const;
  static SweepTable from_csv(std::string_view csv);
};

/// One run per value, sharing the provider (and its caches) and the index
/// directory. A failing cell is marked and the remaining cells still run.
SweepTable sweep(const ExperimentConfig& base, std::span<const int> values, SweepAxis axis = SweepAxis::K,
                 const RunOptions& options = {});

struct ScoreRow {
  std::string name;
  double bleu = 0.0;
  double chrf = 0.0;
};

struct CompareRow {
  std::string name;
  long bleu = 0;  // hundredths
  long chrf = 0;
  long bleu_delta = 0;
  long chrf_delta = 0;
  bool baseline = false;
};

struct CompareTable {
  std::string baseline;
  std::string bleu_label = "BLEU";
  std::vector<CompareRow> rows;

  std::string to_csv() const;
  // Aligned text, deltas annotated as in "35.21 (+8.10)".
  std::string to_text() const;
};

/// "+8.10", "-0.49", "+0.00".
std::string format_delta(long hundredths);

/// Deltas against `baseline`, computed on the two-decimal score columns.
/// Rows sorted by chrF++ descending, then name.
CompareTable compare_scores(std::span<const ScoreRow> rows, std::string_view baseline);

/// As compare_scores; every report must share one test-set fingerprint.
CompareTable compare(std::span<const metrics::EvalReport> reports, std::string_view baseline);

}  // namespace ragmt::pipeline
