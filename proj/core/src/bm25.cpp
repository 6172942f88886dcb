#include "ragmt/bm25.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace ragmt::retrieval {

using nlohmann::json;

Bm25Index::Bm25Index(std::vector<ParallelPair> docs, Bm25Params params)
    : docs_(std::move(docs)), params_(params) {
  if (params_.k1 <= 0.0) throw RetrievalError("bm25: k1 must be positive");
  if (params_.b < 0.0 || params_.b > 1.0) throw RetrievalError("bm25: b must lie in [0,1]");
  doc_len_.reserve(docs_.size());
  std::uint64_t total = 0;
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    const auto toks = tokenizer_.tokenize(docs_[d].source_text);
    doc_len_.push_back(static_cast<std::uint32_t>(toks.size()));
    total += toks.size();
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : toks) ++tf[t];
    for (auto& [term, count] : tf) {
      postings_[term].push_back({static_cast<std::uint32_t>(d), count});
    }
  }
  avgdl_ = docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

double Bm25Index::idf(const std::string& term) const {
  const auto n = static_cast<double>(docs_.size());
  const auto d = static_cast<double>(df(term));
  return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
}

std::size_t Bm25Index::df(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

double Bm25Index::term_weight(double term_idf, std::uint32_t tf, std::size_t doc) const {
  const double f = static_cast<double>(tf);
  const double dl = static_cast<double>(doc_len_[doc]);
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * dl / avgdl_);
  return term_idf * (f * (params_.k1 + 1.0) / (f + norm));
}

double Bm25Index::score(std::string_view query, std::size_t doc) const {
  double s = 0.0;
  for (const auto& t : tokenizer_.tokenize(query)) {
    auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    auto p = std::lower_bound(it->second.begin(), it->second.end(), doc,
                              [](const Posting& x, std::size_t d) { return x.doc < d; });
    if (p != it->second.end() && p->doc == doc) s += term_weight(idf(t), p->tf, doc);
  }
  return s;
}

std::vector<RetrievedExample> Bm25Index::retrieve(std::string_view query, std::size_t k) const {
  if (k == 0) throw RetrievalError("bm25: k must be positive");
  if (docs_.empty()) throw RetrievalError("bm25: index is empty");

  std::vector<double> acc(docs_.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& t : tokenizer_.tokenize(query)) {
    auto it = postings_.find(t);
    if (it == postings_.end()) continue;
    const double term_idf = idf(t);
    for (const auto& p : it->second) {
      if (acc[p.doc] == 0.0) touched.push_back(p.doc);
      acc[p.doc] += term_weight(term_idf, p.tf, p.doc);
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  std::erase_if(touched, [&](std::uint32_t d) { return !(acc[d] > 0.0); });

  auto before = [&](std::uint32_t a, std::uint32_t b) {
    return ranks_before(acc[a], docs_[a].id, acc[b], docs_[b].id);
  };
  const auto take = std::min(k, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(take),
                    touched.end(), before);

  std::vector<RetrievedExample> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({docs_[touched[i]], acc[touched[i]], Strategy::BM25, std::nullopt});
  }
  return out;
}

json Bm25Index::to_json() const {
  json terms = json::object();
  for (const auto& [term, plist] : postings_) {
    json arr = json::array();
    for (const auto& p : plist) arr.push_back({p.doc, p.tf});
    terms[term] = std::move(arr);
  }
  json ids = json::array();
  for (const auto& d : docs_) ids.push_back(d.id);
  return json{{"k1", params_.k1},     {"b", params_.b},        {"avgdl", avgdl_},
              {"doc_ids", ids},       {"doc_len", doc_len_},   {"postings", terms}};
}

Bm25Index Bm25Index::from_json(const json& j, std::vector<ParallelPair> docs) {
  Bm25Index idx;
  idx.params_ = {j.at("k1").get<double>(), j.at("b").get<double>()};
  idx.avgdl_ = j.at("avgdl").get<double>();
  idx.doc_len_ = j.at("doc_len").get<std::vector<std::uint32_t>>();
  const auto& ids = j.at("doc_ids");
  if (ids.size() != docs.size() || idx.doc_len_.size() != docs.size()) {
    throw RetrievalError("bm25 index: document count does not match corpus");
  }
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (ids[i].get<std::string>() != docs[i].id) {
      throw RetrievalError("bm25 index: document order does not match corpus at " + docs[i].id);
    }
  }
  idx.docs_ = std::move(docs);
  for (const auto& [term, arr] : j.at("postings").items()) {
    auto& plist = idx.postings_[term];
    plist.reserve(arr.size());
    for (const auto& p : arr) plist.push_back({p[0].get<std::uint32_t>(), p[1].get<std::uint32_t>()});
  }
  return idx;
}

}  // namespace ragmt::retrieval
