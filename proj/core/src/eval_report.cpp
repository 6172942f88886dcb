#include "ragmt/eval_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ragmt/hash.hpp"

namespace ragmt::metrics {

using nlohmann::json;

std::string format2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", static_cast<double>(hundredths(v)) / 100.0);
  return buf;
}

long hundredths(double v) { return std::lround(v * 100.0); }

std::string test_set_fingerprint(std::span<const std::string> ids, std::span<const std::string> references) {
  Sha256 h;
  h.field("test-set");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    h.field(ids[i]);
    h.field(references[i]);
  }
  return h.hex();
}

EvalReport EvalReport::build(std::span<const std::string> ids, std::span<const std::string> hypotheses,
                             std::span<const std::string> references, const SubwordTokenizer& tokenizer,
                             const ChrfParams& chrf_params) {
  if (hypotheses.size() != references.size() || ids.size() != references.size()) {
    throw std::invalid_argument("report: " + std::to_string(ids.size()) + " ids, " +
                                std::to_string(hypotheses.size()) + " hypotheses, " +
                                std::to_string(references.size()) + " references");
  }
  if (ids.empty()) throw std::invalid_argument("report: empty test set");
  EvalReport r;
  r.bleu_label = metrics::bleu_label(tokenizer);
  r.tokenizer = tokenizer.name();
  r.chrf_params = chrf_params;
  r.test_set_fingerprint = metrics::test_set_fingerprint(ids, references);
  r.per_sentence.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    SentenceScore s;
    s.id = ids[i];
    s.bleu_stats = bleu_statistics(tokenizer.tokenize(hypotheses[i]), tokenizer.tokenize(references[i]));
    s.bleu = bleu_from_stats(s.bleu_stats, r.bleu_floor);
    s.chrf_stats = chrf_statistics(hypotheses[i], references[i], chrf_params);
    s.chrf = chrf_from_stats(s.chrf_stats, chrf_params);
    r.per_sentence.push_back(std::move(s));
  }
  r.recompute();
  return r;
}

double EvalReport::pooled_bleu() const {
  BleuStats total;
  for (const auto& s : per_sentence) total += s.bleu_stats;
  return bleu_from_stats(total, bleu_floor);
}

double EvalReport::pooled_chrf() const {
  ChrfStats total;
  for (const auto& s : per_sentence) total += s.chrf_stats;
  return chrf_from_stats(total, chrf_params);
}

void EvalReport::recompute() {
  corpus_bleu = pooled_bleu();
  corpus_chrf = pooled_chrf();
}

json EvalReport::to_json() const {
  json sentences = json::array();
  for (const auto& s : per_sentence) {
    sentences.push_back({{"id", s.id},
                         {"bleu", s.bleu},
                         {"chrf", s.chrf},
                         {"bleu_stats",
                          {{"correct", s.bleu_stats.correct},
                           {"total", s.bleu_stats.total},
                           {"sys_len", s.bleu_stats.sys_len},
                           {"ref_len", s.bleu_stats.ref_len}}},
                         {"chrf_stats", s.chrf_stats.counts}});
  }
  json out{{"name", name},
              {"corpus_bleu", corpus_bleu},
              {"corpus_chrf", corpus_chrf},
              {"display", {{bleu_label, format2(corpus_bleu)}, {"chrF++", format2(corpus_chrf)}}},
              {"bleu_label", bleu_label},
              {"tokenizer", tokenizer},
              {"bleu_smoothing", {{"method", "floor"}, {"epsilon", bleu_floor}}},
              {"chrf_params",
               {{"char_order", chrf_params.char_order},
                {"word_order", chrf_params.word_order},
                {"beta", chrf_params.beta}}},
              {"config_fingerprint", config_fingerprint},
              {"test_set_fingerprint", test_set_fingerprint},
              {"per_sentence", sentences}};
  if (!decoding.is_null()) out["decoding"] = decoding;
  return out;
}

EvalReport EvalReport::from_json(const json& j) {
  EvalReport r;
  r.name = j.value("name", std::string{});
  r.corpus_bleu = j.at("corpus_bleu").get<double>();
  r.corpus_chrf = j.at("corpus_chrf").get<double>();
  r.bleu_label = j.value("bleu_label", r.bleu_label);
  r.tokenizer = j.value("tokenizer", r.tokenizer);
  if (j.contains("bleu_smoothing")) r.bleu_floor = j["bleu_smoothing"].value("epsilon", kBleuFloor);
  if (j.contains("chrf_params")) {
    const auto& p = j["chrf_params"];
    r.chrf_params.char_order = p.value("char_order", 6);
    r.chrf_params.word_order = p.value("word_order", 2);
    r.chrf_params.beta = p.value("beta", 2.0);
  }
  r.config_fingerprint = j.value("config_fingerprint", std::string{});
  r.test_set_fingerprint = j.value("test_set_fingerprint", std::string{});
  if (j.contains("decoding")) r.decoding = j["decoding"];
  for (const auto& s : j.value("per_sentence", json::array())) {
    SentenceScore sc;
    sc.id = s.at("id").get<std::string>();
    sc.bleu = s.at("bleu").get<double>();
    sc.chrf = s.at("chrf").get<double>();
    if (s.contains("bleu_stats")) {
      const auto& b = s["bleu_stats"];
      sc.bleu_stats.correct = b.at("correct").get<std::array<std::size_t, kBleuOrder>>();
      sc.bleu_stats.total = b.at("total").get<std::array<std::size_t, kBleuOrder>>();
      sc.bleu_stats.sys_len = b.at("sys_len").get<std::size_t>();
      sc.bleu_stats.ref_len = b.at("ref_len").get<std::size_t>();
    }
    if (s.contains("chrf_stats")) sc.chrf_stats.counts = s["chrf_stats"].get<std::vector<std::size_t>>();
    r.per_sentence.push_back(std::move(sc));
  }
  return r;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "id," << bleu_label << ",chrF++\n";
  for (const auto& s : per_sentence) out << s.id << ',' << format2(s.bleu) << ',' << format2(s.chrf) << '\n';
  return out.str();
}

void EvalReport::save(const std::filesystem::path& json_path) const {
  if (json_path.has_parent_path()) std::filesystem::create_directories(json_path.parent_path());
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + json_path.string());
  out << to_json().dump(2) << '\n';
}

EvalReport EvalReport::load(const std::filesystem::path& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read report " + json_path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed report " + json_path.string() + ": " + e.what());
  }
}

}  // namespace ragmt::metrics
