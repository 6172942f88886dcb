// ragmt: corpus, retrieval, prompt, scoring and experiment commands.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ragmt/analysis.hpp"
#include "ragmt/bm25.hpp"
#include "ragmt/chrf_cw.hpp"
#include "ragmt/config.hpp"
#include "ragmt/corpus.hpp"
#include "ragmt/dense.hpp"
#include "ragmt/eval_report.hpp"
#include "ragmt/fuzzy.hpp"
#include "ragmt/index_io.hpp"
#include "ragmt/pipeline.hpp"
#include "ragmt/prompt.hpp"
#include "ragmt/provider.hpp"
#include "ragmt/sweep.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace ragmt;

namespace {

// Exit codes: 0 ok, 1 error, 2 check failed (validation, leakage).
struct CheckFailed {
  std::string msg;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << data;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

// A parallel corpus (source or target side), or plain text with one segment per line.
std::vector<std::string> texts_of(const fs::path& p, const std::string& side) {
  try {
    const auto pairs = load_parallel(p);
    std::vector<std::string> out;
    for (const auto& pr : pairs) out.push_back(side == "target" ? pr.target_text : pr.source_text);
    return out;
  } catch (const CorpusError&) {
    return lines_of(p);
  }
}

json example_json(const retrieval::RetrievedExample& e) {
  json j{{"id", e.pair.id}, {"score", e.score}, {"source", e.pair.source_text}, {"target", e.pair.target_text}};
  if (e.matched_token) j["matched_token"] = *e.matched_token;
  return j;
}

json lexicon_json(const retrieval::RetrievedLexicon& l) {
  return {{"source_word", l.entry.source_word},
          {"pos", l.entry.pos ? json(*l.entry.pos) : json(nullptr)},
          {"target_word", l.entry.target_word},
          {"score", l.score},
          {"query_word", l.query_word}};
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad integer '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void stderr_logger(const std::string& msg) { std::cerr << msg << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retrieval-augmented NMT post-editing experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ragmt 0.3.0");

  // corpus --------------------------------------------------------------
  auto* corpus = app.add_subcommand("corpus", "Load, validate, split and check parallel corpora");
  corpus->require_subcommand(1);

  fs::path validate_input, validate_lexicon;
  std::string validate_format;
  auto* validate = corpus->add_subcommand("validate", "Parse a corpus file and print per-origin counts");
  validate->add_option("input", validate_input, "Parallel corpus (TSV or JSONL)")->check(CLI::ExistingFile);
  validate->add_option("--lexicon", validate_lexicon, "Also validate a lexicon file")->check(CLI::ExistingFile);
  validate->add_option("--format", validate_format, "tsv or jsonl (default: by extension)");
  validate->callback([&] {
    if (validate_input.empty() && validate_lexicon.empty()) throw CLI::ValidationError("nothing to validate");
    json out = json::object();
    try {
      if (!validate_input.empty()) {
        const auto pairs = validate_format.empty()
                               ? load_parallel(validate_input)
                               : load_parallel(validate_input, parse_format(validate_format));
        std::map<std::string, std::size_t> by_origin;
        for (const auto& p : pairs) ++by_origin[std::string(to_string(p.origin))];
        out["pairs"] = pairs.size();
        out["by_origin"] = by_origin;
        out["content_hash"] = content_hash(pairs);
      }
      if (!validate_lexicon.empty()) {
        const auto lex = load_lexicon(validate_lexicon);
        out["lexicon_entries"] = lex.size();
        out["lexicon_hash"] = content_hash(lex);
      }
    } catch (const CorpusError& e) {
      throw CheckFailed{e.what()};
    }
    std::cout << out.dump(2) << '\n';
  });

  fs::path split_input, split_out = "split";
  PartitionSpec split_spec;
  auto* split = corpus->add_subcommand("split", "NT train/validation split and OT test selection");
  split->add_option("input", split_input, "Parallel corpus")->required()->check(CLI::ExistingFile);
  split->add_option("--train-frac", split_spec.train_fraction, "Training fraction of NT pairs")
      ->capture_default_str();
  split->add_option("--test-book", split_spec.test_book, "Test book (name or code)")->capture_default_str();
  split->add_option("--test-verses", split_spec.test_verses, "Number of test verses")->capture_default_str();
  split->add_option("--seed", split_spec.seed, "Shuffle seed")->capture_default_str();
  split->add_option("--out-dir", split_out, "Directory for train/validation/test TSV")->capture_default_str();
  split->callback([&] {
    const auto pairs = load_parallel(split_input);
    const auto parts = partition(pairs, split_spec);
    save_parallel(split_out / "train.tsv", parts.train, FileFormat::TSV);
    save_parallel(split_out / "validation.tsv", parts.validation, FileFormat::TSV);
    save_parallel(split_out / "test.tsv", parts.test, FileFormat::TSV);
    const auto leaks = leakage_check(parts.test, parts.train);
    std::cout << json{{"train", parts.train.size()},
                      {"validation", parts.validation.size()},
                      {"test", parts.test.size()},
                      {"seed", split_spec.seed},
                      {"leakage_collisions", leaks.collisions.size()},
                      {"out_dir", split_out.string()}}
                     .dump(2)
              << '\n';
  });

  fs::path leak_test;
  std::vector<fs::path> leak_aux;
  auto* leak = corpus->add_subcommand("leak-check", "Report test pairs duplicated in auxiliary data");
  leak->add_option("--test", leak_test, "Test pairs")->required()->check(CLI::ExistingFile);
  leak->add_option("--aux", leak_aux, "Training, grammar or retrieval files")->required()->check(CLI::ExistingFile);
  leak->callback([&] {
    const auto test = load_parallel(leak_test);
    std::vector<ParallelPair> aux;
    for (const auto& p : leak_aux) {
      auto more = load_parallel(p);
      aux.insert(aux.end(), more.begin(), more.end());
    }
    const auto report = leakage_check(test, aux);
    json rows = json::array();
    for (const auto& c : report.collisions) {
      rows.push_back({{"test_id", c.test_id},
                      {"aux_id", c.aux_id},
                      {"source_match", c.source_match},
                      {"target_match", c.target_match}});
    }
    std::cout << json{{"clean", report.clean()}, {"collisions", rows}}.dump(2) << '\n';
    if (!report.clean()) throw CheckFailed{std::to_string(report.collisions.size()) + " leakage collisions"};
  });

  // analyze ---------------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "OOV and term-frequency analysis");
  analyze->require_subcommand(1);

  fs::path oov_train, oov_eval, oov_csv;
  std::string oov_mode = "token", oov_side = "source";
  auto* oov = analyze->add_subcommand("oov", "Share of eval tokens missing from the training vocabulary");
  oov->add_option("--train", oov_train, "Training text or corpus")->required()->check(CLI::ExistingFile);
  oov->add_option("--eval", oov_eval, "Evaluation text or corpus")->required()->check(CLI::ExistingFile);
  oov->add_option("--mode", oov_mode, "token or type")->check(CLI::IsMember({"token", "type"}))->capture_default_str();
  oov->add_option("--side", oov_side, "Corpus side when inputs are parallel files")
      ->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
  oov->add_option("--csv", oov_csv, "Also write a one-row CSV");
  oov->callback([&] {
    const text::WordTokenizer tok;
    const auto vocab = analysis::build_vocab(texts_of(oov_train, oov_side), tok);
    const auto mode = oov_mode == "type" ? analysis::OovMode::Type : analysis::OovMode::Token;
    const auto r = analysis::oov_rate(vocab, texts_of(oov_eval, oov_side), tok, mode);
    const json out{{"oov_rate", r.rate},   {"oov", r.oov},
                   {"total", r.total},     {"mode", analysis::to_string(r.mode)},
                   {"tokenizer", tok.name()}, {"vocab_size", vocab.tokens.size()},
                   {"empty_eval", r.empty_eval}};
    std::cout << out.dump(2) << '\n';
    if (!oov_csv.empty()) {
      std::ostringstream csv;
      csv << "oov_rate,oov,total,mode,tokenizer\n"
          << r.rate << ',' << r.oov << ',' << r.total << ',' << analysis::to_string(r.mode) << ',' << tok.name()
          << '\n';
      write_file(oov_csv, csv.str());
    }
  });

  fs::path tf_terms, tf_csv;
  std::vector<fs::path> tf_corpora;
  std::vector<std::string> tf_labels;
  std::string tf_side = "source";
  auto* termfreq = analyze->add_subcommand("termfreq", "Term counts per 10k tokens");
  termfreq->add_option("--terms-file", tf_terms, "One term per line")->required()->check(CLI::ExistingFile);
  termfreq->add_option("--corpus", tf_corpora, "Text or corpus files")->required()->check(CLI::ExistingFile);
  termfreq->add_option("--label", tf_labels, "Label per corpus (default: file stem)");
  termfreq->add_option("--side", tf_side, "Corpus side")->check(CLI::IsMember({"source", "target"}))
      ->capture_default_str();
  termfreq->add_option("--csv", tf_csv, "Write CSV here instead of stdout");
  termfreq->callback([&] {
    if (!tf_labels.empty() && tf_labels.size() != tf_corpora.size()) {
      throw CLI::ValidationError("--label count must match --corpus count");
    }
    std::vector<std::string> terms;
    for (auto& t : lines_of(tf_terms)) {
      if (!text::trim(t).empty()) terms.push_back(text::trim(t));
    }
    analysis::TermFrequencyReport all;
    for (std::size_t i = 0; i < tf_corpora.size(); ++i) {
      const auto label = tf_labels.empty() ? tf_corpora[i].stem().string() : tf_labels[i];
      auto rep = analysis::term_frequency(texts_of(tf_corpora[i], tf_side), terms, label);
      all.rows.insert(all.rows.end(), rep.rows.begin(), rep.rows.end());
    }
    if (tf_csv.empty()) {
      std::cout << all.to_csv();
    } else {
      write_file(tf_csv, all.to_csv());
      json rows = json::array();
      for (const auto& r : all.rows) {
        rows.push_back({{"term", r.term},
                        {"corpus", r.corpus_label},
                        {"raw_count", r.raw_count},
                        {"total_tokens", r.total_tokens},
                        {"count_per_10k", r.count_per_10k}});
      }
      std::cout << rows.dump(2) << '\n';
    }
  });

  // retrieve ----------------------------------------------------------------
  std::string rt_strategy = "bm25", rt_pool = "nt", rt_query;
  fs::path rt_data, rt_lexicon, rt_provider, rt_index_dir;
  std::size_t rt_k = 5;
  std::size_t rt_lexicon_n = 0;
  auto* retrieve = app.add_subcommand("retrieve", "Retrieve examples (and lexicon entries) for one query");
  retrieve->add_option("--strategy", rt_strategy)
      ->check(CLI::IsMember({"bm25", "dense", "chrf-cw", "fuzzy-word"}))
      ->capture_default_str();
  retrieve->add_option("--k,--n", rt_k, "k, or matches per word for fuzzy-word")->capture_default_str();
  retrieve->add_option("--corpus", rt_pool, "Retrieval pool")->check(CLI::IsMember({"nt", "nt+grammar"}))
      ->capture_default_str();
  retrieve->add_option("--data", rt_data, "Parallel corpus file")->required()->check(CLI::ExistingFile);
  retrieve->add_option("--query", rt_query, "Source sentence")->required();
  retrieve->add_option("--lexicon", rt_lexicon, "Lexicon file")->check(CLI::ExistingFile);
  retrieve->add_option("--lexicon-n", rt_lexicon_n, "Fuzzy lexicon entries per word (0: full lexicon)");
  retrieve->add_option("--provider-config", rt_provider, "Provider JSON for dense retrieval")
      ->check(CLI::ExistingFile);
  retrieve->add_option("--index-dir", rt_index_dir, "Index sidecar directory");
  retrieve->callback([&] {
    const auto pool = retrieval::retrieval_pool(load_parallel(rt_data), retrieval::parse_retrieval_corpus(rt_pool));
    json out{{"strategy", rt_strategy}, {"k", rt_k}, {"pool_size", pool.size()}};
    std::vector<retrieval::RetrievedExample> examples;
    if (rt_strategy == "bm25") {
      std::optional<retrieval::Bm25Index> idx;
      retrieval::IndexKey key{retrieval::Strategy::BM25, content_hash(pool), json{{"k1", 1.5}, {"b", 0.75}}, ""};
      if (!rt_index_dir.empty()) idx = retrieval::load_bm25_index(rt_index_dir, key, pool);
      if (!idx) {
        idx.emplace(pool);
        if (!rt_index_dir.empty()) retrieval::save_index(rt_index_dir, key, *idx);
      }
      examples = idx->retrieve(rt_query, rt_k);
    } else if (rt_strategy == "dense") {
      if (rt_provider.empty()) throw CLI::ValidationError("dense retrieval needs --provider-config");
      provider::Provider llm(provider::ProviderConfig::from_json(json::parse(slurp(rt_provider))));
      llm.set_logger(stderr_logger);
      retrieval::IndexKey key{retrieval::Strategy::Dense, content_hash(pool), json::object(),
                              llm.config().embedding_fingerprint()};
      std::optional<retrieval::EmbeddingIndex> idx;
      if (!rt_index_dir.empty()) idx = retrieval::load_embedding_index(rt_index_dir, key, pool);
      if (!idx) {
        std::vector<std::string> texts;
        for (const auto& p : pool) texts.push_back(p.source_text);
        idx.emplace(pool, llm.embed(texts).vectors, key.provider_fingerprint);
        if (!rt_index_dir.empty()) retrieval::save_index(rt_index_dir, key, *idx);
      }
      examples = idx->retrieve(llm.embed_one(rt_query), rt_k);
    } else if (rt_strategy == "chrf-cw") {
      examples = retrieval::ChrfCounterweightedRetriever(pool).retrieve(rt_query, rt_k);
    } else {
      const auto res = retrieval::FuzzyWordRetriever(pool).retrieve_with_stats(rt_query, rt_k);
      examples = res.examples;
      out["matches_before_dedup"] = res.matches_before_dedup;
      out["query_tokens"] = res.query_tokens;
    }
    out["effective_k"] = examples.size();
    out["examples"] = json::array();
    for (const auto& e : examples) out["examples"].push_back(example_json(e));
    if (!rt_lexicon.empty()) {
      retrieval::LexiconRetriever lex(load_lexicon(rt_lexicon));
      const auto entries = rt_lexicon_n == 0 ? lex.full() : lex.fuzzy(rt_query, rt_lexicon_n);
      out["lexicon"] = json::array();
      for (const auto& l : entries) out["lexicon"].push_back(lexicon_json(l));
    }
    std::cout << out.dump(2) << '\n';
  });

  // prompt ----------------------------------------------------------------
  auto* prompt_cmd = app.add_subcommand("prompt", "Prompt templates");
  prompt_cmd->require_subcommand(1);
  std::string pr_mode = "postedit", pr_source, pr_draft;
  fs::path pr_examples, pr_lexicon, pr_profile;
  bool pr_dry_run = false, pr_json = false;
  auto* render = prompt_cmd->add_subcommand("render", "Render a prompt");
  render->add_option("--mode", pr_mode)->check(CLI::IsMember({"direct", "postedit"}))->capture_default_str();
  render->add_option("--source", pr_source, "Source sentence")->required();
  render->add_option("--draft", pr_draft, "NMT draft (post-edit mode)");
  render->add_option("--examples", pr_examples, "Parallel file with examples, in prompt order")
      ->check(CLI::ExistingFile);
  render->add_option("--lexicon", pr_lexicon, "Lexicon file, in prompt order")->check(CLI::ExistingFile);
  render->add_option("--profile", pr_profile, "Language profile JSON")->check(CLI::ExistingFile);
  render->add_flag("--dry-run", pr_dry_run, "Print the exact system and user bytes");
  render->add_flag("--json", pr_json, "Print the request body as JSON");
  render->callback([&] {
    prompt::LanguageProfile profile;
    if (!pr_profile.empty()) profile = prompt::LanguageProfile::from_json(json::parse(slurp(pr_profile)));
    prompt::ContextBundle bundle;
    if (!pr_examples.empty()) {
      for (auto& p : load_parallel(pr_examples)) bundle.examples.push_back({std::move(p), 0.0, {}, {}});
    }
    if (!pr_lexicon.empty()) {
      for (auto& e : load_lexicon(pr_lexicon)) bundle.lexicon.push_back({std::move(e), 1.0, {}});
    }
    const auto rendered = pr_mode == "direct" ? prompt::render_direct(pr_source, bundle, profile)
                                              : prompt::render_postedit(pr_source, pr_draft, bundle, profile);
    if (pr_json) {
      std::cout << json{{"messages",
                         {{{"role", "system"}, {"content", rendered.system}},
                          {{"role", "user"}, {"content", rendered.user}}}},
                        {"bytes", rendered.total_bytes()}}
                       .dump(2)
                << '\n';
    } else if (pr_dry_run) {
      std::cout << "--- system (" << rendered.system.size() << " bytes)\n"
                << rendered.system << "\n--- user (" << rendered.user.size() << " bytes)\n"
                << rendered.user << '\n';
    } else {
      std::cout << rendered.user << '\n';
    }
  });

  // score -------------------------------------------------------------------
  fs::path sc_hyp, sc_ref, sc_tok, sc_out;
  auto* score = app.add_subcommand("score", "chrF++ and BLEU for line-aligned files");
  score->add_option("--hyp", sc_hyp, "Hypotheses, one per line")->required()->check(CLI::ExistingFile);
  score->add_option("--ref", sc_ref, "References, one per line")->required()->check(CLI::ExistingFile);
  score->add_option("--tokenizer-model", sc_tok, "SentencePiece .vocab or BPE merges file")
      ->check(CLI::ExistingFile);
  score->add_option("--out", sc_out, "Write <out>.json and <out>.csv");
  score->callback([&] {
    const auto hyps = lines_of(sc_hyp);
    const auto refs = lines_of(sc_ref);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < refs.size(); ++i) ids.push_back(std::to_string(i + 1));
    const auto tok = metrics::load_tokenizer(sc_tok);
    auto report = metrics::EvalReport::build(ids, hyps, refs, *tok);
    report.name = sc_hyp.stem().string();
    if (!sc_out.empty()) {
      report.save(fs::path(sc_out.string() + ".json"));
      write_file(fs::path(sc_out.string() + ".csv"), report.to_csv());
    }
    json summary{{report.bleu_label, metrics::format2(report.corpus_bleu)},
                 {"chrF++", metrics::format2(report.corpus_chrf)},
                 {"tokenizer", report.tokenizer},
                 {"sentences", report.per_sentence.size()}};
    std::cout << summary.dump(2) << '\n';
  });

  // run -------------------------------------------------------------------
  fs::path run_config;
  bool run_no_resume = false, run_check = false;
  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", run_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  run->add_flag("--no-resume", run_no_resume, "Ignore the journal of an earlier interrupted run");
  run->add_flag("--check", run_check, "Validate the config and inputs, then stop");
  run->callback([&] {
    const auto cfg = pipeline::ExperimentConfig::load(run_config);
    if (run_check) {
      cfg.validate();
      const auto inputs = pipeline::load_inputs(cfg);
      std::cout << json{{"config", "ok"}, {"test", inputs.test.size()}, {"pool", inputs.pool.size()},
                        {"lexicon", inputs.lexicon.size()}}
                       .dump(2)
                << '\n';
      return;
    }
    pipeline::RunOptions opts;
    opts.logger = stderr_logger;
    opts.resume = !run_no_resume;
    const auto res = pipeline::run_experiment(cfg, opts);
    std::cout << json{{"name", res.report.name},
                      {res.report.bleu_label, metrics::format2(res.report.corpus_bleu)},
                      {"chrF++", metrics::format2(res.report.corpus_chrf)},
                      {"effective_k_mean", res.manifest.effective_k.mean},
                      {"network_requests", res.provider_stats.network_requests},
                      {"cache_hits", res.provider_stats.cache_hits},
                      {"output_dir", cfg.output_dir.string()}}
                     .dump(2)
              << '\n';
  });

  // sweep -----------------------------------------------------------------
  fs::path sw_config, sw_csv;
  std::string sw_strategy, sw_values_k, sw_values_n;
  auto* sweep = app.add_subcommand("sweep", "Run one experiment per k or n value");
  sweep->add_option("--config", sw_config, "Base experiment config JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--strategy", sw_strategy, "Override the base context strategy")
      ->check(CLI::IsMember({"bm25", "dense", "chrf-cw", "fuzzy-word", "lexicon-fuzzy"}));
  auto* k_opt = sweep->add_option("--k", sw_values_k, "Comma-separated k values");
  auto* n_opt = sweep->add_option("--n", sw_values_n, "Comma-separated n values");
  k_opt->excludes(n_opt);
  sweep->add_option("--csv", sw_csv, "Output CSV (default: <output_dir>/sweep.csv)");
  sweep->callback([&] {
    auto base = pipeline::ExperimentConfig::load(sw_config);
    auto axis = pipeline::SweepAxis::K;
    if (sw_strategy == "lexicon-fuzzy") {
      axis = pipeline::SweepAxis::LexiconN;
      base.lexicon_mode = pipeline::LexiconMode::FuzzyN;
    } else if (!sw_strategy.empty()) {
      base.context = pipeline::parse_context_mode(sw_strategy);
    }
    const auto values = parse_int_list(sw_values_k.empty() ? sw_values_n : sw_values_k);
    if (values.empty()) throw CLI::ValidationError("give --k or --n values");
    // Placeholders so the base config validates; each cell overrides them.
    if (axis == pipeline::SweepAxis::K && base.k == 0) base.k = values.front();
    if (axis == pipeline::SweepAxis::LexiconN && base.lexicon_n == 0) base.lexicon_n = values.front();
    pipeline::RunOptions opts;
    opts.logger = stderr_logger;
    const auto table = pipeline::sweep(base, values, axis, opts);
    const auto csv = table.to_csv();
    write_file(sw_csv.empty() ? base.output_dir / "sweep.csv" : sw_csv, csv);
    std::cout << csv;
    for (const auto& r : table.rows) {
      if (r.status != "ok") throw CheckFailed{"one or more sweep cells failed"};
    }
  });

  // compare ---------------------------------------------------------------
  std::vector<fs::path> cmp_reports;
  fs::path cmp_scores, cmp_csv;
  std::string cmp_baseline;
  auto* compare = app.add_subcommand("compare", "Rank reports with deltas against a baseline");
  compare->add_option("reports", cmp_reports, "EvalReport JSON files")->check(CLI::ExistingFile);
  compare->add_option("--scores", cmp_scores, "CSV with name,bleu,chrf columns instead of reports")
      ->check(CLI::ExistingFile);
  compare->add_option("--baseline", cmp_baseline, "Baseline row (report name or file stem)")->required();
  compare->add_option("--csv", cmp_csv, "Also write the table as CSV");
  compare->callback([&] {
    pipeline::CompareTable table;
    if (!cmp_scores.empty()) {
      std::vector<pipeline::ScoreRow> rows;
      const auto lines = lines_of(cmp_scores);
      for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream ss(lines[i]);
        pipeline::ScoreRow r;
        std::string bleu, chrf;
        if (!std::getline(ss, r.name, ',') || !std::getline(ss, bleu, ',') || !std::getline(ss, chrf, ',')) {
          throw std::runtime_error(cmp_scores.string() + ":" + std::to_string(i + 1) + ": expected name,bleu,chrf");
        }
        r.bleu = std::stod(bleu);
        r.chrf = std::stod(chrf);
        rows.push_back(std::move(r));
      }
      table = pipeline::compare_scores(rows, cmp_baseline);
    } else {
      std::vector<metrics::EvalReport> reports;
      for (const auto& p : cmp_reports) {
        auto r = metrics::EvalReport::load(p);
        r.name = p.stem().string() == cmp_baseline || r.name.empty() ? p.stem().string() : r.name;
        reports.push_back(std::move(r));
      }
      table = pipeline::compare(reports, cmp_baseline);
    }
    if (!cmp_csv.empty()) write_file(cmp_csv, table.to_csv());
    std::cout << table.to_text();
  });

  // presets -----------------------------------------------------------------
  std::string preset_name;
  auto* presets = app.add_subcommand("preset", "Print a named experiment config");
  presets->add_option("name", preset_name, "Preset name (omit to list)");
  presets->callback([&] {
    if (preset_name.empty()) {
      for (const auto& n : pipeline::preset_names()) std::cout << n << '\n';
      return;
    }
    std::cout << pipeline::preset(preset_name).to_json().dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CheckFailed& e) {
    std::cerr << "ragmt: " << e.msg << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ragmt: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
