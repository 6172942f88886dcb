#include "ragmt/chrf_cw.hpp"

#include <algorithm>
#include <set>

#include "ragmt/text.hpp"

namespace ragmt::retrieval {

namespace {

std::u32string squeeze(std::string_view s) {
  std::u32string out;
  for (char32_t cp : text::decode_utf8(s)) {
    if (!text::is_space(cp)) out.push_back(text::to_lower(cp));
  }
  return out;
}

}  // namespace

CharNgramProfile::CharNgramProfile(std::string_view s, int min_order, int max_order) {
  const auto chars = squeeze(s);
  for (int n = min_order; n <= max_order; ++n) {
    const auto len = static_cast<std::size_t>(n);
    if (chars.size() < len) continue;
    for (std::size_t i = 0; i + len <= chars.size(); ++i) {
      auto gram = chars.substr(i, len);
      auto [it, inserted] = counts_.emplace(gram, 0);
      if (inserted) distinct_.push_back(std::move(gram));
      ++it->second;
      ++total_;
    }
  }
}

std::size_t CharNgramProfile::count(const std::u32string& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second;
}

ChrfCounterweightedRetriever::ChrfCounterweightedRetriever(std::vector<ParallelPair> pairs,
                                                           ChrfCwParams params)
    : pairs_(std::move(pairs)), params_(params) {
  if (params_.min_order < 1 || params_.max_order < params_.min_order) {
    throw RetrievalError("chrf-cw: invalid n-gram order range");
  }
  if (!(params_.gamma >= 0.0 && params_.gamma <= 1.0)) {
    throw RetrievalError("chrf-cw: gamma must lie in [0,1]");
  }
  gram_totals_.reserve(pairs_.size());
  for (std::size_t c = 0; c < pairs_.size(); ++c) {
    CharNgramProfile prof(pairs_[c].source_text, params_.min_order, params_.max_order);
    gram_totals_.push_back(prof.total());
    for (const auto& g : prof.distinct()) postings_[g].push_back(static_cast<std::uint32_t>(c));
  }
}

double ChrfCounterweightedRetriever::overlap(std::string_view query, std::size_t candidate) const {
  const CharNgramProfile q(query, params_.min_order, params_.max_order);
  if (gram_totals_[candidate] == 0) return 0.0;
  double s = 0.0;
  for (const auto& g : q.distinct()) {
    auto it = postings_.find(g);
    if (it == postings_.end()) continue;
    if (std::binary_search(it->second.begin(), it->second.end(), candidate)) s += 1.0;
  }
  return s / static_cast<double>(gram_totals_[candidate]);
}

std::vector<RetrievedExample> ChrfCounterweightedRetriever::retrieve(std::string_view query,
                                                                     std::size_t k) const {
  if (k == 0) throw RetrievalError("chrf-cw: k must be positive");
  const CharNgramProfile q(query, params_.min_order, params_.max_order);
  if (q.total() == 0) throw RetrievalError("chrf-cw: query is empty");

  // For every candidate sharing at least one query n-gram, the indices of the
  // shared query n-grams in ascending order.
  const auto& grams = q.distinct();
  std::unordered_map<std::uint32_t, std::uint32_t> slot;
  std::vector<std::uint32_t> cand;
  std::vector<std::vector<std::uint32_t>> shared;
  for (std::uint32_t j = 0; j < grams.size(); ++j) {
    auto it = postings_.find(grams[j]);
    if (it == postings_.end()) continue;
    for (auto c : it->second) {
      if (gram_totals_[c] == 0) continue;
      auto [s, inserted] = slot.emplace(c, static_cast<std::uint32_t>(cand.size()));
      if (inserted) {
        cand.push_back(c);
        shared.emplace_back();
      }
      shared[s->second].push_back(j);
    }
  }

  std::vector<double> weight(grams.size(), 1.0);
  std::set<std::string_view> selected_sources;
  const bool defer_duplicates = params_.gamma < 1.0;

  auto exact_score = [&](std::uint32_t i) {
    double s = 0.0;
    for (auto j : shared[i]) s += weight[j];
    return s / static_cast<double>(gram_totals_[cand[i]]);
  };
  // Rank class: 0 = fresh text, 1 = repeats a selected source, 2 = zero score.
  auto rank_class = [&](std::uint32_t i, double s) {
    if (!(s > 0.0)) return 2;
    return defer_duplicates && selected_sources.contains(pairs_[cand[i]].source_text) ? 1 : 0;
  };

  // Scores only decrease and classes only worsen as weights decay, so stale
  // heap entries are upper bounds (lazy greedy evaluation).
  struct Entry {
    int cls;
    double score;
    std::uint32_t i;
    std::size_t round;
  };
  auto worse = [&](const Entry& a, const Entry& b) {
    if (a.cls != b.cls) return a.cls > b.cls;
    return ranks_before(b.score, pairs_[cand[b.i]].id, a.score, pairs_[cand[a.i]].id);
  };
  std::vector<Entry> heap;
  heap.reserve(cand.size());
  for (std::uint32_t i = 0; i < cand.size(); ++i) {
    const double s = exact_score(i);
    heap.push_back({rank_class(i, s), s, i, 0});
  }
  std::make_heap(heap.begin(), heap.end(), worse);

  std::vector<RetrievedExample> out;
  std::size_t round = 0;
  while (out.size() < k && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    Entry top = heap.back();
    heap.pop_back();
    if (top.round != round) {
      top.score = exact_score(top.i);
      top.cls = rank_class(top.i, top.score);
      top.round = round;
      heap.push_back(top);
      std::push_heap(heap.begin(), heap.end(), worse);
      continue;
    }
    if (top.cls == 2) break;
    const auto c = cand[top.i];
    selected_sources.insert(pairs_[c].source_text);
    for (auto j : shared[top.i]) weight[j] *= params_.gamma;
    out.push_back({pairs_[c], top.score, Strategy::ChrfCounterweighted, std::nullopt});
    ++round;
  }
  return out;
}

}  // namespace ragmt::retrieval
