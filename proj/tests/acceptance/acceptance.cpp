// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "paths.hpp"
#include "ragmt/analysis.hpp"
#include "ragmt/bleu.hpp"
#include "ragmt/bm25.hpp"
#include "ragmt/chrf.hpp"
#include "ragmt/chrf_cw.hpp"
#include "ragmt/dense.hpp"
#include "ragmt/fuzzy.hpp"
#include "ragmt/pipeline.hpp"
#include "ragmt/prompt.hpp"
#include "ragmt/sweep.hpp"

using namespace ragmt;
using nlohmann::json;
using testing_paths::data;
using testing_paths::scratch;
using testing_paths::slurp;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

// Collects the first few mismatches of a check.
struct Check {
  std::vector<std::string> problems;
  void expect(bool ok, const std::string& what) {
    if (!ok) problems.push_back(what);
  }
  Outcome outcome(const std::string& pass_detail) const {
    if (problems.empty()) return {Verdict::Pass, pass_detail};
    std::string d = std::to_string(problems.size()) + " mismatch(es), first: " + problems.front();
    return {Verdict::Fail, d};
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << std::fixed << x;
  return s.str();
}

Outcome metric_parity() {
  std::vector<std::string> hyps, refs;
  {
    std::istringstream in(slurp(data("metrics/pairs.tsv")));
    std::string line;
    while (std::getline(in, line)) {
      const auto tab = line.find('\t');
      hyps.push_back(line.substr(0, tab));
      refs.push_back(line.substr(tab + 1));
    }
  }
  const auto want = json::parse(slurp(data("metrics/oracle.json")));
  Check c;
  c.expect(hyps.size() == 20, "fixture has " + std::to_string(hyps.size()) + " pairs");
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const double d = std::abs(metrics::chrf_pp(hyps[i], refs[i]) - want["sentence_chrf"][i].get<double>());
    worst = std::max(worst, d);
    c.expect(d <= 0.1, "sentence chrF++ " + std::to_string(i) + " off by " + fmt(d));
  }
  const double corpus = metrics::corpus_chrf(hyps, refs);
  c.expect(std::abs(corpus - want["corpus_chrf"].get<double>()) <= 0.1, "corpus chrF++ " + fmt(corpus));

  std::vector<std::string> bh, br;
  for (const auto& i : want["bleu_pairs"]) {
    bh.push_back(hyps[i.get<std::size_t>()]);
    br.push_back(refs[i.get<std::size_t>()]);
  }
  metrics::WhitespaceTokenizer ws;
  const double bleu = metrics::corpus_bleu(bh, br, ws);
  std::vector<std::vector<std::string>> th, tr;
  for (const auto& h : bh) th.push_back(ws.tokenize(h));
  for (const auto& r : br) tr.push_back(ws.tokenize(r));
  const double ref_bleu = oracle::bleu(th, tr);
  c.expect(std::abs(bleu - ref_bleu) <= 0.01, "BLEU " + fmt(bleu) + " vs oracle " + fmt(ref_bleu));
  c.expect(std::abs(bleu - want["corpus_bleu"].get<double>()) <= 0.01, "BLEU vs sacrebleu " + fmt(bleu));
  const double secs = seconds_since(t0);
  c.expect(secs < 1.0, "took " + fmt(secs) + "s");
  return c.outcome("chrF++ max sentence diff " + fmt(worst) + ", corpus " + fmt(corpus, 2) + "; BLEU " +
                   fmt(bleu, 2) + "; " + fmt(secs, 3) + "s");
}

Outcome retrieval_oracles() {
  using namespace retrieval;
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  // Library time only; the brute-force oracles are excluded from the bound.
  double lib = 0;
  auto timed = [&lib](auto&& f) {
    const auto s = std::chrono::steady_clock::now();
    auto out = f();
    lib += seconds_since(s);
    return out;
  };
  const auto docs = oracle::synthetic_corpus(1000, 2024);
  const auto queries = oracle::synthetic_queries(20, 2025);

  auto bm25 = timed([&] { return Bm25Index(docs); });
  for (const auto& q : queries) {
    for (std::size_t k : {1u, 10u, 100u}) {
      const auto got = timed([&] { return bm25.retrieve(q, k); });
      const auto want = oracle::bm25(docs, q, k);
      c.expect(got.size() == want.size(), "bm25 size for '" + q + "'");
      for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) {
        c.expect(got[i].pair.id == want[i].id && got[i].score == want[i].score, "bm25 rank " + std::to_string(i));
      }
    }
  }

  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> vecs(docs.size(), std::vector<double>(32));
  for (auto& v : vecs) {
    for (auto& x : v) x = g(rng);
  }
  vecs[10] = vecs[500];
  auto dense = timed([&] { return EmbeddingIndex(docs, vecs, "acceptance"); });
  for (int i = 0; i < 20; ++i) {
    std::vector<double> q(32);
    for (auto& x : q) x = g(rng);
    if (i == 0) q = vecs[10];
    const auto got = timed([&] { return dense.retrieve(q, 25); });
    const auto want = oracle::dense(docs, vecs, q, 25);
    c.expect(got.size() == want.size(), "dense size");
    for (std::size_t r = 0; r < std::min(got.size(), want.size()); ++r) {
      c.expect(got[r].pair.id == want[r].id && std::abs(got[r].score - want[r].score) <= 1e-12,
               "dense rank " + std::to_string(r));
    }
  }

  const std::vector<ParallelPair> fdocs(docs.begin(), docs.begin() + 400);
  auto fuzzy = timed([&] { return FuzzyWordRetriever(fdocs); });
  for (std::size_t qi = 0; qi < 8; ++qi) {
    for (std::size_t n : {1u, 3u, 10u}) {
      const auto got = timed([&] { return fuzzy.retrieve_with_stats(queries[qi], n); });
      const auto want = oracle::fuzzy_word(fdocs, queries[qi], n);
      c.expect(got.examples.size() == want.hits.size(), "fuzzy size for '" + queries[qi] + "'");
      for (std::size_t r = 0; r < std::min(got.examples.size(), want.hits.size()); ++r) {
        c.expect(got.examples[r].pair.id == want.hits[r].id && got.examples[r].score == want.hits[r].score,
                 "fuzzy rank " + std::to_string(r));
      }
    }
  }

  const auto lex = load_lexicon(data("demo/lexicon.tsv"));
  auto lr = timed([&] { return LexiconRetriever(lex); });
  const auto demo = load_parallel(data("demo/corpus.tsv"));
  for (std::size_t i = 0; i < demo.size(); i += 8) {
    for (std::size_t n : {1u, 3u, 50u}) {
      const auto got = timed([&] { return lr.fuzzy(demo[i].source_text, n); });
      const auto want = oracle::lexicon_fuzzy(lex, demo[i].source_text, n);
      c.expect(got.size() == want.size(), "lexicon size for " + demo[i].id);
      for (std::size_t r = 0; r < std::min(got.size(), want.size()); ++r) {
        c.expect(got[r].entry == lex[want[r].index] && got[r].score == want[r].score,
                 "lexicon rank " + std::to_string(r) + " for " + demo[i].id);
      }
    }
  }
  const double secs = seconds_since(t0);
  c.expect(lib < 10.0, "retrievers took " + fmt(lib) + "s");
  return c.outcome("bm25/dense on 1000, fuzzy-word on 400, lexicon " + std::to_string(lex.size()) + " entries; " +
                   fmt(lib, 2) + "s retrieval, " + fmt(secs, 2) + "s with oracles");
}

Outcome chrf_cw_properties() {
  using namespace retrieval;
  Check c;
  const auto pool = oracle::synthetic_corpus(300, 77);
  const auto queries = oracle::synthetic_queries(50, 78);
  ChrfCounterweightedRetriever half(pool, {2, 6, 0.5});
  ChrfCounterweightedRetriever one(pool, {2, 6, 1.0});
  std::size_t dup_checks = 0;
  for (const auto& q : queries) {
    std::vector<oracle::Hit> plain;
    for (const auto& p : pool) {
      const double s = oracle::chrf_overlap(p, q);
      if (s > 0) plain.push_back({p.id, s, {}});
    }
    std::sort(plain.begin(), plain.end(), oracle::before);

    const auto top = half.retrieve(q, 1);
    c.expect(!plain.empty() && top.size() == 1 && top[0].pair.id == plain[0].id, "k=1 differs for '" + q + "'");

    const auto ranked = one.retrieve(q, 10);
    const std::size_t m = std::min<std::size_t>(10, plain.size());
    c.expect(ranked.size() == m, "gamma=1 size for '" + q + "'");
    for (std::size_t i = 0; i < std::min(m, ranked.size()); ++i) {
      c.expect(ranked[i].pair.id == plain[i].id, "gamma=1 rank " + std::to_string(i) + " for '" + q + "'");
    }

    // Unbounded k, so selection runs until the distinct candidates are used up.
    const auto sel = half.retrieve(q, pool.size());
    std::set<std::string> texts, ids;
    for (std::size_t i = 0; i < sel.size(); ++i) {
      const bool dup = !texts.insert(sel[i].pair.source_text).second;
      if (dup) {
        // Every distinct, unselected text must have zero overlap.
        ++dup_checks;
        for (const auto& p : pool) {
          if (ids.contains(p.id) || texts.contains(p.source_text)) continue;
          c.expect(oracle::chrf_overlap(p, q) == 0.0, "duplicate taken while " + p.id + " still scores");
        }
      }
      ids.insert(sel[i].pair.id);
    }
  }
  c.expect(dup_checks > 0, "no duplicate pick was exercised");
  return c.outcome("50 queries; " + std::to_string(dup_checks) + " duplicate picks checked");
}

Outcome prompt_goldens() {
  using namespace prompt;
  Check c;
  const auto j = json::parse(slurp(data("prompts/inputs.json")));
  std::size_t n = 0;
  for (const std::string mode : {"direct", "postedit"}) {
    for (const std::string ctx : {"none", "examples", "glossary", "examples_glossary"}) {
      for (bool pos : {true, false}) {
        ContextBundle b;
        if (ctx.find("examples") != std::string::npos) {
          for (const auto& e : j["examples"]) {
            b.examples.push_back({{e["id"], e["source"], e["target"], Origin::NT, {}}, 1.0,
                                  retrieval::Strategy::BM25, {}});
          }
        }
        if (ctx.find("glossary") != std::string::npos) {
          for (const auto& g : j["glossary"]) {
            b.lexicon.push_back({{g["source_word"], pos ? std::optional<std::string>(g["pos"]) : std::nullopt,
                                  g["target_word"]},
                                 1.0,
                                 {}});
          }
        }
        const std::string source = j["source"], draft = j["draft"];
        const auto p = mode == "direct" ? render_direct(source, b) : render_postedit(source, draft, b);
        const auto stem = mode + "_" + ctx + "_" + (pos ? "pos" : "nopos");
        c.expect(p.user == slurp(data("prompts/" + stem + ".user.txt")), stem);
        c.expect(p.system == slurp(data("prompts/" + mode + ".system.txt")), mode + " system");
        ++n;
      }
    }
  }
  return c.outcome(std::to_string(n) + " layouts byte-exact");
}

Outcome replay_determinism() {
  using namespace pipeline;
  Check c;
  std::string report, manifest;
  for (int i = 0; i < 3; ++i) {
    auto cfg = ExperimentConfig::load(data("demo/configs/final.json"));
    cfg.output_dir = scratch("acceptance_replay") / "run";
    const auto res = run_experiment(cfg);
    c.expect(res.provider_stats.network_requests == 0, "replay made network requests");
    const auto r = slurp(cfg.output_dir / "report.json");
    const auto m = slurp(cfg.output_dir / "manifest.json");
    if (i == 0) {
      report = r;
      manifest = m;
      c.expect(res.manifest.records.size() == 10, "demo has " + std::to_string(res.manifest.records.size()));
    } else {
      c.expect(r == report, "report.json differs on run " + std::to_string(i + 1));
      c.expect(m == manifest, "manifest.json differs on run " + std::to_string(i + 1));
    }
  }
  // NMT-only runs with a transport that records any call.
  struct Tripwire : provider::Transport {
    std::size_t calls = 0;
    provider::HttpResponse post_json(const std::string&, const std::string&) override {
      ++calls;
      return {500, "", "tripwire"};
    }
  };
  auto trip = std::make_shared<Tripwire>();
  auto nmt = ExperimentConfig::load(data("demo/configs/nmt-only.json"));
  nmt.output_dir = scratch("acceptance_nmt") / "run";
  const auto res = run_experiment(nmt, {trip});
  c.expect(trip->calls == 0 && res.provider_stats.network_requests == 0, "NMT_ONLY made network requests");
  return c.outcome("3 replay runs identical; NMT_ONLY requests " + std::to_string(trip->calls));
}

Outcome dynamic_k() {
  using namespace pipeline;
  Check c;
  auto cfg = ExperimentConfig::load(data("demo/configs/fuzzy-word.json"));
  const auto inputs = load_inputs(cfg);
  retrieval::FuzzyWordRetriever r(inputs.pool);
  double prev = -1;
  std::string trace;
  for (std::size_t n : {1u, 2u, 3u, 5u, 10u, 20u}) {
    double k_sum = 0, tok_sum = 0;
    for (const auto& t : inputs.test) {
      const auto res = r.retrieve_with_stats(t.source_text, n);
      k_sum += static_cast<double>(res.examples.size());
      tok_sum += static_cast<double>(res.query_tokens);
    }
    const double mean_k = k_sum / static_cast<double>(inputs.test.size());
    const double mean_tok = tok_sum / static_cast<double>(inputs.test.size());
    c.expect(mean_k <= static_cast<double>(n) * mean_tok, "n=" + std::to_string(n) + " mean k " + fmt(mean_k));
    c.expect(mean_k >= prev, "not monotone at n=" + std::to_string(n));
    prev = mean_k;
    trace += (trace.empty() ? "" : " ") + std::to_string(n) + ":" + fmt(mean_k, 1);
  }
  return c.outcome("mean effective k by n " + trace);
}

Outcome web_oov() {
  const char* path = std::getenv("RAGMT_WEB_CORPUS");
  if (!path || !*path) return {Verdict::Skip, "RAGMT_WEB_CORPUS not set"};
  Check c;
  const auto pairs = load_parallel(path);
  const auto part = partition(pairs, {});
  auto sources = [](const std::vector<ParallelPair>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.source_text);
    return out;
  };
  const auto vocab = analysis::build_vocab(sources(part.train));
  const auto in_domain = analysis::oov_rate(vocab, sources(part.validation)).rate;
  const auto ot = analysis::oov_rate(vocab, sources(part.test)).rate;
  c.expect(std::abs(in_domain - 0.081) <= 0.01, "in-domain OOV " + fmt(in_domain));
  c.expect(std::abs(ot - 0.259) <= 0.01, "OT OOV " + fmt(ot));
  return c.outcome("in-domain " + fmt(in_domain) + ", OT " + fmt(ot));
}

Outcome delta_bookkeeping() {
  using namespace pipeline;
  Check c;
  const std::vector<ScoreRow> rows = {{"Baseline (NMT Only)", 7.66, 27.11},
                                      {"+ Lexicon (Full)", 16.27, 31.32},
                                      {"+ Sentences (Word-Level)", 18.93, 35.28},
                                      {"+ Combined (Final)", 19.88, 35.21}};
  const auto t = compare_scores(rows, "Baseline (NMT Only)");
  const std::map<std::string, std::pair<std::string, std::string>> want = {
      {"Baseline (NMT Only)", {"+0.00", "+0.00"}},
      {"+ Lexicon (Full)", {"+8.61", "+4.21"}},
      {"+ Sentences (Word-Level)", {"+11.27", "+8.17"}},
      {"+ Combined (Final)", {"+12.22", "+8.10"}}};
  for (const auto& r : t.rows) {
    const auto& [b, ch] = want.at(r.name);
    c.expect(format_delta(r.bleu_delta) == b, r.name + " BLEU delta " + format_delta(r.bleu_delta));
    c.expect(format_delta(r.chrf_delta) == ch, r.name + " chrF++ delta " + format_delta(r.chrf_delta));
  }
  // Same numbers through the shipped score sheet.
  std::vector<ScoreRow> sheet;
  std::istringstream in(slurp(data("../../configs/ablation_scores.csv")));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.rfind(',');
    const auto b = line.rfind(',', a - 1);
    sheet.push_back({line.substr(0, b), std::stod(line.substr(b + 1, a - b - 1)), std::stod(line.substr(a + 1))});
  }
  c.expect(sheet.size() >= 4, "ablation_scores.csv has " + std::to_string(sheet.size()) + " rows");
  if (sheet.size() >= 2) {
    const auto text = compare_scores(sheet, "Baseline (NMT Only)").to_text();
    for (const char* s : {"16.27 (+8.61)", "31.32 (+4.21)", "18.93 (+11.27)", "35.28 (+8.17)", "19.88 (+12.22)",
                          "35.21 (+8.10)"}) {
      c.expect(text.find(s) != std::string::npos, std::string("missing ") + s);
    }
  }
  return c.outcome("4 rows, deltas exact");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric parity", metric_parity},
      {"retrieval oracle equivalence", retrieval_oracles},
      {"chrF-cw properties", chrf_cw_properties},
      {"prompt goldens", prompt_goldens},
      {"replay determinism", replay_determinism},
      {"dynamic k", dynamic_k},
      {"WEB OOV rates", web_oov},
      {"delta bookkeeping", delta_bookkeeping},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::Fail) ++failed;
    std::cout << tag << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
