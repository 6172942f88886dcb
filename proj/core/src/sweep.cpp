#include "ragmt/sweep.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include "ragmt/text.hpp"

namespace ragmt::pipeline {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

double parse_number(const std::string& s, std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw PipelineError("sweep csv line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string SweepTable::to_csv() const {
  std::ostringstream out;
  out << "strategy,k_or_n,effective_k_mean," << bleu_label << ",chrF++,status\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << r.k_or_n << ',';
    if (r.status == "ok") {
      out << metrics::format2(r.effective_k_mean) << ',' << metrics::format2(r.bleu) << ','
          << metrics::format2(r.chrf);
    } else {
      out << ",,";
    }
    out << ',' << r.status << '\n';
  }
  return out.str();
}

SweepTable SweepTable::from_csv(std::string_view csv) {
  SweepTable t;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 6) {
      throw PipelineError("sweep csv line " + std::to_string(lineno) + ": expected 6 columns, got " +
                          std::to_string(cells.size()));
    }
    if (lineno == 1) {
      if (cells[0] != "strategy") throw PipelineError("sweep csv lacks a header row");
      t.bleu_label = cells[3];
      continue;
    }
    SweepRow r;
    r.strategy = cells[0];
    r.k_or_n = static_cast<int>(parse_number(cells[1], lineno));
    r.status = cells[5];
    if (r.status == "ok") {
      r.effective_k_mean = parse_number(cells[2], lineno);
      r.bleu = parse_number(cells[3], lineno);
      r.chrf = parse_number(cells[4], lineno);
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

SweepTable sweep(const ExperimentConfig& base, std::span<const int> values, SweepAxis axis,
                 const RunOptions& options) {
  if (values.empty()) throw PipelineError("sweep needs at least one value");
  if (axis == SweepAxis::K && base.context == ContextMode::None) {
    throw PipelineError("k sweep needs a retrieval context");
  }
  if (axis == SweepAxis::LexiconN && base.lexicon_mode != LexiconMode::FuzzyN) {
    throw PipelineError("lexicon-n sweep needs lexicon_mode fuzzy-n");
  }
  // Every cell is validated before the first network call.
  std::vector<ExperimentConfig> cells;
  for (int v : values) {
    auto cfg = base;
    (axis == SweepAxis::K ? cfg.k : cfg.lexicon_n) = v;
    cfg.name = base.strategy_label() + "-" + std::to_string(v);
    cfg.output_dir = base.output_dir / cfg.name;
    if (cfg.index_dir.empty()) cfg.index_dir = base.effective_index_dir();
    cfg.validate();
    cells.push_back(std::move(cfg));
  }

  RunOptions opts = options;
  if (!opts.shared_provider && base.mode != RunMode::NmtOnly) {
    opts.shared_provider = std::make_shared<provider::Provider>(*base.provider, options.transport);
    if (options.logger) opts.shared_provider->set_logger(options.logger);
  }

  SweepTable table;
  bool label_set = false;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    SweepRow row;
    row.strategy = base.strategy_label();
    row.k_or_n = values[i];
    row.output_dir = cells[i].output_dir;
    const auto before = opts.shared_provider ? opts.shared_provider->stats().network_requests : 0;
    try {
      auto res = run_experiment(cells[i], opts);
      row.effective_k_mean = res.manifest.effective_k.mean;
      row.bleu = res.report.corpus_bleu;
      row.chrf = res.report.corpus_chrf;
      if (!label_set) {
        table.bleu_label = res.report.bleu_label;
        label_set = true;
      }
    } catch (const std::exception& e) {
      row.status = "failed";
      row.error = e.what();
      if (options.logger) options.logger(cells[i].name + " failed: " + e.what());
    }
    if (opts.shared_provider) row.provider_requests = opts.shared_provider->stats().network_requests - before;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_delta(long hundredths) {
  const long a = hundredths < 0 ? -hundredths : hundredths;
  std::string frac = std::to_string(a % 100);
  if (frac.size() < 2) frac = "0" + frac;
  return std::string(hundredths < 0 ? "-" : "+") + std::to_string(a / 100) + "." + frac;
}

CompareTable compare_scores(std::span<const ScoreRow> rows, std::string_view baseline) {
  if (rows.size() < 2) throw PipelineError("compare needs at least two rows");
  std::set<std::string> names;
  const ScoreRow* base = nullptr;
  for (const auto& r : rows) {
    if (!names.insert(r.name).second) throw PipelineError("duplicate row name '" + r.name + "'");
    if (r.name == baseline) base = &r;
  }
  if (!base) throw PipelineError("baseline '" + std::string(baseline) + "' is not among the rows");

  CompareTable t;
  t.baseline = std::string(baseline);
  const long base_bleu = metrics::hundredths(base->bleu);
  const long base_chrf = metrics::hundredths(base->chrf);
  for (const auto& r : rows) {
    CompareRow c;
    c.name = r.name;
    c.bleu = metrics::hundredths(r.bleu);
    c.chrf = metrics::hundredths(r.chrf);
    c.bleu_delta = c.bleu - base_bleu;
    c.chrf_delta = c.chrf - base_chrf;
    c.baseline = r.name == baseline;
    t.rows.push_back(std::move(c));
  }
  std::stable_sort(t.rows.begin(), t.rows.end(), [](const CompareRow& a, const CompareRow& b) {
    if (a.chrf != b.chrf) return a.chrf > b.chrf;
    return a.name < b.name;
  });
  return t;
}

CompareTable compare(std::span<const metrics::EvalReport> reports, std::string_view baseline) {
  if (reports.size() < 2) throw PipelineError("compare needs at least two reports");
  std::vector<ScoreRow> rows;
  for (const auto& r : reports) {
    if (r.test_set_fingerprint != reports.front().test_set_fingerprint) {
      throw PipelineError("report '" + r.name + "' was scored on a different test set than '" +
                          reports.front().name + "'");
    }
    if (r.bleu_label != reports.front().bleu_label) {
      throw PipelineError("report '" + r.name + "' uses " + r.bleu_label + ", '" + reports.front().name +
                          "' uses " + reports.front().bleu_label);
    }
    rows.push_back({r.name, r.corpus_bleu, r.corpus_chrf});
  }
  auto t = compare_scores(rows, baseline);
  t.bleu_label = reports.front().bleu_label;
  return t;
}

std::string CompareTable::to_csv() const {
  std::ostringstream out;
  out << "name," << bleu_label << ',' << bleu_label << "_delta,chrF++,chrF++_delta\n";
  for (const auto& r : rows) {
    out << r.name << ',' << metrics::format2(r.bleu / 100.0) << ',' << format_delta(r.bleu_delta) << ','
        << metrics::format2(r.chrf / 100.0) << ',' << format_delta(r.chrf_delta) << '\n';
  }
  return out.str();
}

std::string CompareTable::to_text() const {
  std::size_t width = 13;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  std::ostringstream out;
  out << pad("Configuration", width) << "  " << pad(bleu_label, 16) << "chrF++\n";
  for (const auto& r : rows) {
    std::string b = metrics::format2(r.bleu / 100.0);
    std::string c = metrics::format2(r.chrf / 100.0);
    if (!r.baseline) {
      b += " (" + format_delta(r.bleu_delta) + ")";
      c += " (" + format_delta(r.chrf_delta) + ")";
    }
    out << pad(r.name, width) << "  " << pad(b, 16) << c << '\n';
  }
  return out.str();
}

}  // namespace ragmt::pipeline
