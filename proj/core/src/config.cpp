#include "ragmt/config.hpp"

#include <algorithm>
#include <fstream>

namespace ragmt::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::NmtOnly: return "nmt-only";
    case RunMode::DirectLlm: return "direct";
    case RunMode::PostEdit: return "post-edit";
  }
  return "?";
}

std::string_view to_string(ContextMode m) {
  switch (m) {
    case ContextMode::None: return "none";
    case ContextMode::StaticK: return "static-k";
    case ContextMode::BM25: return "bm25";
    case ContextMode::Dense: return "dense";
    case ContextMode::ChrfCw: return "chrf-cw";
    case ContextMode::FuzzyWord: return "fuzzy-word";
  }
  return "?";
}

std::string_view to_string(LexiconMode m) {
  switch (m) {
    case LexiconMode::None: return "none";
    case LexiconMode::FuzzyN: return "fuzzy-n";
    case LexiconMode::Full: return "full";
  }
  return "?";
}

RunMode parse_run_mode(std::string_view s) {
  if (s == "nmt-only" || s == "NMT_ONLY") return RunMode::NmtOnly;
  if (s == "direct" || s == "DIRECT_LLM") return RunMode::DirectLlm;
  if (s == "post-edit" || s == "POST_EDIT") return RunMode::PostEdit;
  throw ConfigError("unknown mode '" + std::string(s) + "' (expected nmt-only, direct, post-edit)");
}

ContextMode parse_context_mode(std::string_view s) {
  if (s == "none" || s == "NONE") return ContextMode::None;
  if (s == "static-k" || s == "STATIC_K") return ContextMode::StaticK;
  if (s == "bm25" || s == "BM25") return ContextMode::BM25;
  if (s == "dense" || s == "DENSE") return ContextMode::Dense;
  if (s == "chrf-cw" || s == "CHRF_CW") return ContextMode::ChrfCw;
  if (s == "fuzzy-word" || s == "FUZZY_WORD") return ContextMode::FuzzyWord;
  throw ConfigError("unknown context '" + std::string(s) +
                    "' (expected none, static-k, bm25, dense, chrf-cw, fuzzy-word)");
}

LexiconMode parse_lexicon_mode(std::string_view s) {
  if (s == "none" || s == "NONE") return LexiconMode::None;
  if (s == "fuzzy-n" || s == "FUZZY_N") return LexiconMode::FuzzyN;
  if (s == "full" || s == "FULL") return LexiconMode::Full;
  throw ConfigError("unknown lexicon_mode '" + std::string(s) + "' (expected none, fuzzy-n, full)");
}

namespace {

fs::path resolve(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return {};
  fs::path p = j[key].get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "name",   "preset",  "mode",           "context",        "k",         "static_seed",
      "lexicon_mode", "lexicon_n", "retrieval_corpus", "bm25", "chrf_cw", "chrf",
      "corpus", "lexicon", "test",           "test_selector",  "drafts",    "tokenizer_model",
      "output_dir", "index_dir", "provider", "language_profile"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  try {
    ExperimentConfig c = j.contains("preset") ? preset(j["preset"].get<std::string>()) : ExperimentConfig{};
    c.name = j.value("name", c.name);
    if (j.contains("mode")) c.mode = parse_run_mode(j["mode"].get<std::string>());
    if (j.contains("context")) c.context = parse_context_mode(j["context"].get<std::string>());
    c.k = j.value("k", c.k);
    if (j.contains("static_seed")) {
      if (j["static_seed"].is_null()) {
        c.static_seed.reset();
      } else {
        c.static_seed = j["static_seed"].get<std::uint64_t>();
      }
    }
    if (j.contains("lexicon_mode")) c.lexicon_mode = parse_lexicon_mode(j["lexicon_mode"].get<std::string>());
    c.lexicon_n = j.value("lexicon_n", c.lexicon_n);
    if (j.contains("retrieval_corpus")) {
      c.retrieval_corpus = retrieval::parse_retrieval_corpus(j["retrieval_corpus"].get<std::string>());
    }
    if (j.contains("bm25")) {
      c.bm25.k1 = j["bm25"].value("k1", c.bm25.k1);
      c.bm25.b = j["bm25"].value("b", c.bm25.b);
    }
    if (j.contains("chrf_cw")) {
      c.chrf_cw.min_order = j["chrf_cw"].value("min_order", c.chrf_cw.min_order);
      c.chrf_cw.max_order = j["chrf_cw"].value("max_order", c.chrf_cw.max_order);
      c.chrf_cw.gamma = j["chrf_cw"].value("gamma", c.chrf_cw.gamma);
    }
    if (j.contains("chrf")) {
      c.chrf.char_order = j["chrf"].value("char_order", c.chrf.char_order);
      c.chrf.word_order = j["chrf"].value("word_order", c.chrf.word_order);
      c.chrf.beta = j["chrf"].value("beta", c.chrf.beta);
    }
    if (j.contains("corpus")) c.corpus = resolve(j, "corpus", base_dir);
    if (j.contains("lexicon")) c.lexicon = resolve(j, "lexicon", base_dir);
    if (j.contains("test")) c.test = resolve(j, "test", base_dir);
    if (j.contains("test_selector")) {
      c.test_selector.book = j["test_selector"].value("book", c.test_selector.book);
      c.test_selector.verses = j["test_selector"].value("verses", c.test_selector.verses);
    }
    if (j.contains("drafts")) c.drafts = resolve(j, "drafts", base_dir);
    if (j.contains("tokenizer_model")) c.tokenizer_model = resolve(j, "tokenizer_model", base_dir);
    if (j.contains("output_dir")) c.output_dir = resolve(j, "output_dir", base_dir);
    if (j.contains("index_dir")) c.index_dir = resolve(j, "index_dir", base_dir);
    if (j.contains("provider")) {
      if (j["provider"].is_null()) {
        c.provider.reset();
      } else {
        auto pj = j["provider"];
        for (const char* key : {"cache_dir", "replay_dir"}) {
          if (pj.contains(key)) pj[key] = resolve(pj, key, base_dir).string();
        }
        c.provider = provider::ProviderConfig::from_json(pj);
      }
    }
    if (j.contains("language_profile")) c.language = prompt::LanguageProfile::from_json(j["language_profile"]);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const provider::ProviderError& e) {
    throw ConfigError(std::string("provider: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j, path.parent_path());
}

json ExperimentConfig::to_json() const {
  json j{{"name", name},
         {"mode", to_string(mode)},
         {"context", to_string(context)},
         {"k", k},
         {"static_seed", static_seed ? json(*static_seed) : json(nullptr)},
         {"lexicon_mode", to_string(lexicon_mode)},
         {"lexicon_n", lexicon_n},
         {"retrieval_corpus", retrieval::to_string(retrieval_corpus)},
         {"bm25", {{"k1", bm25.k1}, {"b", bm25.b}}},
         {"chrf_cw", {{"min_order", chrf_cw.min_order}, {"max_order", chrf_cw.max_order}, {"gamma", chrf_cw.gamma}}},
         {"chrf", {{"char_order", chrf.char_order}, {"word_order", chrf.word_order}, {"beta", chrf.beta}}},
         {"corpus", corpus.string()},
         {"lexicon", lexicon.string()},
         {"test", test.string()},
         {"test_selector", {{"book", test_selector.book}, {"verses", test_selector.verses}}},
         {"drafts", drafts.string()},
         {"tokenizer_model", tokenizer_model.string()},
         {"output_dir", output_dir.string()},
         {"index_dir", index_dir.string()},
         {"provider", provider ? provider->to_json() : json(nullptr)},
         {"language_profile", language.to_json()}};
  return j;
}

void ExperimentConfig::validate() const {
  auto fail = [&](const std::string& msg) { throw ConfigError((name.empty() ? "" : name + ": ") + msg); };

  if (mode == RunMode::NmtOnly) {
    if (drafts.empty()) fail("nmt-only mode requires a drafts file");
    if (provider) fail("nmt-only mode forbids a provider");
    if (context != ContextMode::None || lexicon_mode != LexiconMode::None) {
      fail("nmt-only mode takes no context or lexicon");
    }
  } else {
    if (!provider) fail(std::string(to_string(mode)) + " mode requires a provider");
    provider->validate();
  }
  if (mode == RunMode::PostEdit && drafts.empty()) fail("post-edit mode requires a drafts file");

  if (context == ContextMode::None) {
    if (k != 0) fail("k is set but context is none");
  } else if (k < 1) {
    fail(std::string(to_string(context)) + " context requires k >= 1");
  }
  if (context == ContextMode::StaticK && !static_seed) fail("static-k context requires static_seed");
  if (context != ContextMode::StaticK && static_seed) fail("static_seed is only meaningful for static-k");

  if (lexicon_mode == LexiconMode::FuzzyN && lexicon_n < 1) fail("fuzzy-n lexicon requires lexicon_n >= 1");
  if (lexicon_mode != LexiconMode::FuzzyN && lexicon_n != 0) fail("lexicon_n is set but lexicon_mode is not fuzzy-n");
  if (lexicon_mode != LexiconMode::None && lexicon.empty()) fail("lexicon_mode requires a lexicon file");

  if (corpus.empty() && (context != ContextMode::None || test.empty())) {
    fail("corpus file is required for retrieval context or test selection");
  }
  if (test.empty() && test_selector.verses < 1) fail("test_selector.verses must be >= 1");
  if (bm25.k1 < 0 || bm25.b < 0 || bm25.b > 1) fail("bm25 requires k1 >= 0 and 0 <= b <= 1");
  if (chrf_cw.min_order < 1 || chrf_cw.max_order < chrf_cw.min_order) {
    fail("chrf_cw requires 1 <= min_order <= max_order");
  }
  if (!(chrf_cw.gamma > 0.0) || chrf_cw.gamma > 1.0) fail("chrf_cw.gamma must be in (0, 1]");
  try {
    chrf.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (output_dir.empty()) fail("output_dir is empty");
}

fs::path ExperimentConfig::effective_index_dir() const {
  if (!index_dir.empty()) return index_dir;
  return output_dir.parent_path() / "indices";
}

std::string ExperimentConfig::strategy_label() const {
  if (context != ContextMode::None) return std::string(to_string(context));
  if (lexicon_mode == LexiconMode::FuzzyN) return "lexicon-fuzzy";
  if (lexicon_mode == LexiconMode::Full) return "lexicon-full";
  return std::string(to_string(mode));
}

std::vector<std::string> preset_names() {
  return {"nmt-only", "direct-0shot", "direct-5shot", "postedit-0shot", "postedit-5shot", "bm25",
          "dense", "chrf-cw", "fuzzy-word", "lexicon-fuzzy", "lexicon-full", "final"};
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig c;
  c.name = std::string(name);
  c.provider = provider::ProviderConfig{};
  c.mode = RunMode::PostEdit;
  if (name == "nmt-only") {
    c.mode = RunMode::NmtOnly;
    c.provider.reset();
  } else if (name == "direct-0shot") {
    c.mode = RunMode::DirectLlm;
  } else if (name == "direct-5shot") {
    c.mode = RunMode::DirectLlm;
    c.context = ContextMode::StaticK;
    c.k = 5;
    c.static_seed = 42;
  } else if (name == "postedit-0shot") {
  } else if (name == "postedit-5shot") {
    c.context = ContextMode::StaticK;
    c.k = 5;
    c.static_seed = 42;
  } else if (name == "bm25") {
    c.context = ContextMode::BM25;
    c.k = 80;
  } else if (name == "dense") {
    c.context = ContextMode::Dense;
    c.k = 100;
  } else if (name == "chrf-cw") {
    c.context = ContextMode::ChrfCw;
    c.k = 60;
  } else if (name == "fuzzy-word") {
    c.context = ContextMode::FuzzyWord;
    c.k = 10;
  } else if (name == "lexicon-fuzzy") {
    c.lexicon_mode = LexiconMode::FuzzyN;
    c.lexicon_n = 100;
  } else if (name == "lexicon-full") {
    c.lexicon_mode = LexiconMode::Full;
  } else if (name == "final") {
    c.context = ContextMode::FuzzyWord;
    c.k = 10;
    c.lexicon_mode = LexiconMode::Full;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

}  // namespace ragmt::pipeline
