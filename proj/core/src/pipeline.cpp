#include "ragmt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "ragmt/bm25.hpp"
#include "ragmt/chrf_cw.hpp"
#include "ragmt/dense.hpp"
#include "ragmt/fuzzy.hpp"
#include "ragmt/hash.hpp"
#include "ragmt/index_io.hpp"
#include "ragmt/subword.hpp"
#include "ragmt/text.hpp"

namespace ragmt::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

json SentenceRecord::to_json() const {
  json lex = json::array();
  for (const auto& e : lexicon) {
    lex.push_back({{"source_word", e.source_word},
                   {"pos", e.pos ? json(*e.pos) : json(nullptr)},
                   {"target_word", e.target_word}});
  }
  return json{{"id", id},
              {"source", source},
              {"reference", reference},
              {"draft", draft ? json(*draft) : json(nullptr)},
              {"retrieved_ids", retrieved_ids},
              {"retrieved_scores", retrieved_scores},
              {"lexicon", lex},
              {"effective_k", effective_k},
              {"matches_before_dedup", matches_before_dedup},
              {"query_tokens", query_tokens},
              {"prompt_sha256", prompt_sha256},
              {"prompt_bytes", prompt_bytes},
              {"exchange_key", exchange_key},
              {"completion", completion},
              {"hypothesis", hypothesis},
              {"bleu", bleu},
              {"chrf", chrf},
              {"status", status},
              {"error", error}};
}

SentenceRecord SentenceRecord::from_json(const json& j) {
  SentenceRecord r;
  r.id = j.at("id").get<std::string>();
  r.source = j.at("source").get<std::string>();
  r.reference = j.at("reference").get<std::string>();
  if (j.contains("draft") && !j["draft"].is_null()) r.draft = j["draft"].get<std::string>();
  r.retrieved_ids = j.value("retrieved_ids", std::vector<std::string>{});
  r.retrieved_scores = j.value("retrieved_scores", std::vector<double>{});
  for (const auto& e : j.value("lexicon", json::array())) {
    LexiconEntry entry;
    entry.source_word = e.at("source_word").get<std::string>();
    if (e.contains("pos") && !e["pos"].is_null()) entry.pos = e["pos"].get<std::string>();
    entry.target_word = e.at("target_word").get<std::string>();
    r.lexicon.push_back(std::move(entry));
  }
  r.effective_k = j.value("effective_k", std::size_t{0});
  r.matches_before_dedup = j.value("matches_before_dedup", std::size_t{0});
  r.query_tokens = j.value("query_tokens", std::size_t{0});
  r.prompt_sha256 = j.value("prompt_sha256", std::string{});
  r.prompt_bytes = j.value("prompt_bytes", std::size_t{0});
  r.exchange_key = j.value("exchange_key", std::string{});
  r.completion = j.value("completion", std::string{});
  r.hypothesis = j.value("hypothesis", std::string{});
  r.bleu = j.value("bleu", 0.0);
  r.chrf = j.value("chrf", 0.0);
  r.status = j.value("status", std::string("ok"));
  r.error = j.value("error", std::string{});
  return r;
}

json RunManifest::to_json() const {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return json{{"config_fingerprint", config_fingerprint},
              {"strategy", strategy},
              {"k_or_n", k_or_n},
              {"corpus_hashes", corpus_hashes},
              {"status", status},
              {"effective_k",
               {{"mean", effective_k.mean},
                {"min", effective_k.min},
                {"max", effective_k.max},
                {"mean_query_tokens", effective_k.mean_query_tokens}}},
              {"records", recs}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.config_fingerprint = j.at("config_fingerprint").get<std::string>();
  m.strategy = j.value("strategy", std::string{});
  m.k_or_n = j.value("k_or_n", 0);
  m.corpus_hashes = j.value("corpus_hashes", std::map<std::string, std::string>{});
  m.status = j.value("status", std::string("complete"));
  if (j.contains("effective_k")) {
    const auto& e = j["effective_k"];
    m.effective_k.mean = e.value("mean", 0.0);
    m.effective_k.min = e.value("min", std::size_t{0});
    m.effective_k.max = e.value("max", std::size_t{0});
    m.effective_k.mean_query_tokens = e.value("mean_query_tokens", 0.0);
  }
  for (const auto& r : j.value("records", json::array())) m.records.push_back(SentenceRecord::from_json(r));
  return m;
}

void RunManifest::save(const fs::path& path) const {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write manifest " + path.string());
  out << to_json().dump(2) << '\n';
}

RunManifest RunManifest::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot read manifest " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw PipelineError("malformed manifest " + path.string() + ": " + e.what());
  }
}

namespace {

void write_text(const fs::path& path, const std::string& data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + path.string());
  out << data;
}

std::string prompt_hash(const prompt::RenderedPrompt& p) {
  Sha256 h;
  h.field(p.system);
  h.field(p.user);
  return h.hex();
}

std::string drafts_hash(const std::vector<std::optional<std::string>>& drafts) {
  Sha256 h;
  h.field("drafts");
  for (const auto& d : drafts) h.field(d ? "1" + *d : "0");
  return h.hex();
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw PipelineError(std::string(what) + " file not found: " + p.string());
}

prompt::RenderedPrompt render(const ExperimentConfig& config, const std::string& source,
                              const std::optional<std::string>& draft, const prompt::ContextBundle& bundle) {
  if (config.mode == RunMode::PostEdit) {
    return prompt::render_postedit(source, *draft, bundle, config.language);
  }
  return prompt::render_direct(source, bundle, config.language);
}

EffectiveKStats effective_k_stats(const std::vector<SentenceRecord>& records) {
  EffectiveKStats s;
  if (records.empty()) return s;
  double sum = 0.0;
  double tokens = 0.0;
  s.min = records.front().effective_k;
  for (const auto& r : records) {
    sum += static_cast<double>(r.effective_k);
    tokens += static_cast<double>(r.query_tokens);
    s.min = std::min(s.min, r.effective_k);
    s.max = std::max(s.max, r.effective_k);
  }
  s.mean = sum / static_cast<double>(records.size());
  s.mean_query_tokens = tokens / static_cast<double>(records.size());
  return s;
}

// Append-only record journal used for resuming interrupted runs.
class Journal {
 public:
  Journal(const fs::path& path, const std::string& fingerprint, bool resume) : path_(path) {
    if (resume && fs::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::string line;
      bool header_ok = false;
      if (std::getline(in, line)) {
        try {
          header_ok = json::parse(line).value("config_fingerprint", "") == fingerprint;
        } catch (const json::exception&) {
        }
      }
      if (header_ok) {
        while (std::getline(in, line)) {
          try {
            auto rec = SentenceRecord::from_json(json::parse(line));
            if (rec.status == "ok") done_[rec.id] = std::move(rec);
          } catch (const std::exception&) {
            // A torn final line from an interrupted write; the sentence is redone.
          }
        }
      }
    }
    fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw PipelineError("cannot write journal " + path.string());
    out_ << json{{"config_fingerprint", fingerprint}}.dump() << '\n';
    for (const auto& [id, rec] : done_) out_ << rec.to_json().dump() << '\n';
    out_.flush();
  }

  const SentenceRecord* find(const std::string& id) const {
    auto it = done_.find(id);
    return it == done_.end() ? nullptr : &it->second;
  }

  void append(const SentenceRecord& rec) {
    std::lock_guard lock(mu_);
    out_ << rec.to_json().dump() << '\n';
    out_.flush();
  }

 private:
  fs::path path_;
  std::map<std::string, SentenceRecord> done_;
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace

std::vector<std::optional<std::string>> load_drafts(const fs::path& path, const std::vector<ParallelPair>& test) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PipelineError("cannot read drafts " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  const bool keyed = !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const std::string& l) {
    return l.find('\t') != std::string::npos;
  });
  std::vector<std::optional<std::string>> out(test.size());
  if (keyed) {
    std::unordered_map<std::string, std::string> by_id;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto tab = lines[i].find('\t');
      auto id = lines[i].substr(0, tab);
      if (!by_id.emplace(id, lines[i].substr(tab + 1)).second) {
        throw PipelineError(path.string() + ":" + std::to_string(i + 1) + ": duplicate draft id '" + id + "'");
      }
    }
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (auto it = by_id.find(test[i].id); it != by_id.end()) out[i] = it->second;
    }
  } else {
    if (lines.size() != test.size()) {
      throw PipelineError("drafts file " + path.string() + " has " + std::to_string(lines.size()) +
                          " lines for " + std::to_string(test.size()) + " test pairs");
    }
    for (std::size_t i = 0; i < test.size(); ++i) out[i] = lines[i];
  }
  return out;
}

ExperimentInputs load_inputs(const ExperimentConfig& config) {
  ExperimentInputs in;
  std::vector<ParallelPair> all;
  try {
    if (!config.corpus.empty()) {
      require_file(config.corpus, "corpus");
      all = load_parallel(config.corpus);
      in.pool = retrieval::retrieval_pool(all, config.retrieval_corpus);
      in.hashes["corpus"] = content_hash(all);
    }
    if (!config.test.empty()) {
      require_file(config.test, "test");
      in.test = load_parallel(config.test);
    } else {
      in.test = select_test(all, config.test_selector.book, config.test_selector.verses);
    }
    in.hashes["test"] = content_hash(in.test);
    if (!config.lexicon.empty()) {
      require_file(config.lexicon, "lexicon");
      in.lexicon = load_lexicon(config.lexicon);
      in.hashes["lexicon"] = content_hash(in.lexicon);
    }
  } catch (const CorpusError& e) {
    throw PipelineError(e.what());
  }
  if (in.test.empty()) throw PipelineError("test set is empty");
  if (config.context != ContextMode::None && in.pool.empty()) {
    throw PipelineError("retrieval pool is empty (no NT pairs in " + config.corpus.string() + ")");
  }
  if (!config.drafts.empty()) {
    require_file(config.drafts, "drafts");
    in.drafts = load_drafts(config.drafts, in.test);
    for (std::size_t i = 0; i < in.test.size(); ++i) {
      if (!in.drafts[i]) throw PipelineError("no draft for test id '" + in.test[i].id + "'");
    }
    in.hashes["drafts"] = drafts_hash(in.drafts);
  } else {
    in.drafts.assign(in.test.size(), std::nullopt);
  }
  return in;
}

std::string config_fingerprint(const ExperimentConfig& config, const std::map<std::string, std::string>& hashes,
                               const std::string& tokenizer_name) {
  json j{{"mode", to_string(config.mode)},
         {"context", to_string(config.context)},
         {"k", config.k},
         {"static_seed", config.static_seed ? json(*config.static_seed) : json(nullptr)},
         {"lexicon_mode", to_string(config.lexicon_mode)},
         {"lexicon_n", config.lexicon_n},
         {"retrieval_corpus", retrieval::to_string(config.retrieval_corpus)},
         {"chrf", {config.chrf.char_order, config.chrf.word_order, config.chrf.beta}},
         {"tokenizer", tokenizer_name},
         {"language", config.language.to_json()},
         {"inputs", hashes}};
  if (config.context == ContextMode::BM25) j["bm25"] = {config.bm25.k1, config.bm25.b};
  if (config.context == ContextMode::ChrfCw) {
    j["chrf_cw"] = {config.chrf_cw.min_order, config.chrf_cw.max_order, config.chrf_cw.gamma};
  }
  if (config.provider) {
    j["model"] = config.provider->model_name;
    j["temperature"] = config.provider->temperature;
    if (config.context == ContextMode::Dense) j["embedding_model"] = config.provider->embedding_model_name();
  }
  return sha256_hex(j.dump());
}

prompt::RenderedPrompt rerender(const SentenceRecord& record, const ExperimentConfig& config,
                                const ExperimentInputs& inputs) {
  std::unordered_map<std::string, const ParallelPair*> by_id;
  for (const auto& p : inputs.pool) by_id.emplace(p.id, &p);
  prompt::ContextBundle bundle;
  for (std::size_t i = 0; i < record.retrieved_ids.size(); ++i) {
    auto it = by_id.find(record.retrieved_ids[i]);
    if (it == by_id.end()) throw PipelineError("manifest references unknown pair '" + record.retrieved_ids[i] + "'");
    retrieval::RetrievedExample ex;
    ex.pair = *it->second;
    if (i < record.retrieved_scores.size()) ex.score = record.retrieved_scores[i];
    bundle.examples.push_back(std::move(ex));
  }
  if (config.lexicon_mode == LexiconMode::Full) {
    bundle.lexicon = retrieval::LexiconRetriever(inputs.lexicon).full();
  } else {
    for (const auto& e : record.lexicon) bundle.lexicon.push_back({e, 1.0, {}});
  }
  return render(config, record.source, record.draft, bundle);
}

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  auto log = [&](const std::string& msg) {
    if (options.logger) options.logger(msg);
  };

  const auto inputs = load_inputs(config);
  const auto tokenizer = metrics::load_tokenizer(config.tokenizer_model);
  const auto fingerprint = config_fingerprint(config, inputs.hashes, tokenizer->name());

  {
    const auto leaks = leakage_check(inputs.test, inputs.pool);
    if (!leaks.clean()) {
      log("warning: " + std::to_string(leaks.collisions.size()) +
          " test/retrieval-pool collisions, first: " + leaks.collisions.front().test_id + " ~ " +
          leaks.collisions.front().aux_id);
    }
  }

  std::shared_ptr<provider::Provider> llm;
  if (config.mode != RunMode::NmtOnly) {
    llm = options.shared_provider ? options.shared_provider
                                  : std::make_shared<provider::Provider>(*config.provider, options.transport);
    if (options.logger && !options.shared_provider) llm->set_logger(options.logger);
  }

  // Sentence retriever.
  std::unique_ptr<retrieval::SentenceRetriever> retriever;
  const retrieval::FuzzyWordRetriever* fuzzy = nullptr;
  std::vector<retrieval::RetrievedExample> static_examples;
  const auto pool_hash = content_hash(inputs.pool);
  switch (config.context) {
    case ContextMode::None:
      break;
    case ContextMode::StaticK: {
      std::vector<const ParallelPair*> nt;
      for (const auto& p : inputs.pool) {
        if (p.origin == Origin::NT) nt.push_back(&p);
      }
      const auto perm = seeded_permutation(nt.size(), *config.static_seed);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(config.k), nt.size());
      for (std::size_t i = 0; i < k; ++i) static_examples.push_back({*nt[perm[i]], 0.0, {}, {}});
      break;
    }
    case ContextMode::BM25: {
      retrieval::IndexKey key{retrieval::Strategy::BM25, pool_hash,
                              json{{"k1", config.bm25.k1}, {"b", config.bm25.b}}, ""};
      auto idx = retrieval::load_bm25_index(config.effective_index_dir(), key, inputs.pool);
      if (!idx) {
        idx.emplace(inputs.pool, config.bm25);
        retrieval::save_index(config.effective_index_dir(), key, *idx);
      }
      retriever = std::make_unique<retrieval::Bm25Index>(std::move(*idx));
      break;
    }
    case ContextMode::Dense: {
      retrieval::IndexKey key{retrieval::Strategy::Dense, pool_hash, json::object(),
                              llm->config().embedding_fingerprint()};
      auto idx = retrieval::load_embedding_index(config.effective_index_dir(), key, inputs.pool);
      if (!idx) {
        std::vector<std::string> texts;
        for (const auto& p : inputs.pool) texts.push_back(p.source_text);
        auto batch = llm->embed(texts);
        idx.emplace(inputs.pool, batch.vectors, key.provider_fingerprint);
        retrieval::save_index(config.effective_index_dir(), key, *idx);
      }
      auto* raw = llm.get();
      retriever = std::make_unique<retrieval::DenseRetriever>(
          std::move(*idx), [raw](std::string_view q) { return raw->embed_one(q); });
      break;
    }
    case ContextMode::ChrfCw:
      retriever = std::make_unique<retrieval::ChrfCounterweightedRetriever>(inputs.pool, config.chrf_cw);
      break;
    case ContextMode::FuzzyWord: {
      auto f = std::make_unique<retrieval::FuzzyWordRetriever>(inputs.pool);
      fuzzy = f.get();
      retriever = std::move(f);
      break;
    }
  }

  std::optional<retrieval::LexiconRetriever> lexicon;
  std::vector<retrieval::RetrievedLexicon> full_lexicon;
  if (config.lexicon_mode != LexiconMode::None) {
    lexicon.emplace(inputs.lexicon);
    if (config.lexicon_mode == LexiconMode::Full) full_lexicon = lexicon->full();
  }

  Journal journal(config.output_dir / "journal.jsonl", fingerprint, options.resume);

  const std::size_t n = inputs.test.size();
  std::vector<SentenceRecord> records(n);
  std::vector<char> done(n, 0);
  std::size_t resumed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (const auto* prev = journal.find(inputs.test[i].id)) {
      records[i] = *prev;
      done[i] = 1;
      ++resumed;
    }
  }
  if (resumed) log("resuming: " + std::to_string(resumed) + " of " + std::to_string(n) + " sentences done");

  const auto k = static_cast<std::size_t>(std::max(config.k, 0));
  auto process = [&](std::size_t i) {
    const auto& pair = inputs.test[i];
    SentenceRecord rec;
    rec.id = pair.id;
    rec.source = pair.source_text;
    rec.reference = pair.target_text;
    rec.draft = inputs.drafts[i];
    rec.query_tokens = retrieval::query_tokens(pair.source_text).size();

    if (config.mode == RunMode::NmtOnly) {
      rec.hypothesis = *rec.draft;
      return rec;
    }
    prompt::ContextBundle bundle;
    if (config.context == ContextMode::StaticK) {
      bundle.examples = static_examples;
    } else if (fuzzy) {
      auto res = fuzzy->retrieve_with_stats(pair.source_text, k);
      bundle.examples = std::move(res.examples);
      rec.matches_before_dedup = res.matches_before_dedup;
    } else if (retriever) {
      bundle.examples = retriever->retrieve(pair.source_text, k);
    }
    for (const auto& ex : bundle.examples) {
      rec.retrieved_ids.push_back(ex.pair.id);
      rec.retrieved_scores.push_back(ex.score);
    }
    rec.effective_k = bundle.examples.size();
    if (config.lexicon_mode == LexiconMode::Full) {
      bundle.lexicon = full_lexicon;
    } else if (config.lexicon_mode == LexiconMode::FuzzyN) {
      bundle.lexicon = lexicon->fuzzy(pair.source_text, static_cast<std::size_t>(config.lexicon_n));
      for (const auto& l : bundle.lexicon) rec.lexicon.push_back(l.entry);
    }
    const auto rendered = render(config, rec.source, rec.draft, bundle);
    rec.prompt_sha256 = prompt_hash(rendered);
    rec.prompt_bytes = rendered.total_bytes();
    const auto ex = llm->complete(rendered);
    rec.exchange_key = ex.key;
    rec.completion = ex.response_text;
    rec.hypothesis = text::trim(ex.response_text);
    return rec;
  };

  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex err_mu;
  std::exception_ptr first_error;
  std::size_t failed_index = n;
  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      if (done[i]) continue;
      try {
        records[i] = process(i);
        done[i] = 1;
        journal.append(records[i]);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        auto& rec = records[i];
        rec.id = inputs.test[i].id;
        rec.source = inputs.test[i].source_text;
        rec.reference = inputs.test[i].target_text;
        rec.draft = inputs.drafts[i];
        rec.status = "failed";
        rec.error = e.what();
        if (!first_error) {
          first_error = std::current_exception();
          failed_index = i;
        }
        abort.store(true);
      }
    }
  };

  const std::size_t threads =
      llm ? std::max<std::size_t>(1, std::min(llm->config().max_in_flight, n)) : std::size_t{1};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  RunManifest manifest;
  manifest.config_fingerprint = fingerprint;
  manifest.strategy = config.strategy_label();
  manifest.k_or_n = config.context != ContextMode::None ? config.k : config.lexicon_n;
  manifest.corpus_hashes = inputs.hashes;

  if (first_error) {
    std::size_t completed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) {
        manifest.records.push_back(records[i]);
        ++completed;
      } else if (records[i].status == "failed") {
        manifest.records.push_back(records[i]);
      }
    }
    manifest.status = "incomplete";
    manifest.effective_k = effective_k_stats(manifest.records);
    manifest.save(config.output_dir / "manifest.json");
    throw PipelineError("sentence '" + inputs.test[failed_index].id + "' failed: " + records[failed_index].error +
                        " (" + std::to_string(completed) + " of " + std::to_string(n) +
                        " sentences completed; partial manifest in " + config.output_dir.string() + ")");
  }

  std::vector<std::string> ids, hyps, refs;
  for (const auto& r : records) {
    ids.push_back(r.id);
    hyps.push_back(r.hypothesis);
    refs.push_back(r.reference);
  }
  auto report = metrics::EvalReport::build(ids, hyps, refs, *tokenizer, config.chrf);
  report.name = config.name;
  report.config_fingerprint = fingerprint;
  if (config.provider) {
    report.decoding = {{"model", config.provider->model_name}, {"temperature", config.provider->temperature}};
  }
  for (std::size_t i = 0; i < n; ++i) {
    records[i].bleu = report.per_sentence[i].bleu;
    records[i].chrf = report.per_sentence[i].chrf;
  }
  manifest.records = std::move(records);
  manifest.effective_k = effective_k_stats(manifest.records);

  manifest.save(config.output_dir / "manifest.json");
  report.save(config.output_dir / "report.json");
  write_text(config.output_dir / "report.csv", report.to_csv());
  std::string hyp_tsv;
  for (std::size_t i = 0; i < n; ++i) hyp_tsv += ids[i] + "\t" + hyps[i] + "\n";
  write_text(config.output_dir / "hypotheses.tsv", hyp_tsv);

  RunResult out{std::move(report), std::move(manifest), llm ? llm->stats() : provider::ProviderStats{}, resumed};
  log(config.name + ": " + out.report.bleu_label + " " + metrics::format2(out.report.corpus_bleu) + ", chrF++ " +
      metrics::format2(out.report.corpus_chrf));
  return out;
}

}  // namespace ragmt::pipeline
