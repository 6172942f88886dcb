#include "ragmt/subword.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ragmt/hash.hpp"
#include "ragmt/text.hpp"

namespace ragmt::metrics {

namespace {

const std::string kMarker = "\xE2\x96\x81";  // U+2581

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tokenizer model " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& data) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= data.size()) {
    auto end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    start = end + 1;
  }
  return out;
}

std::string model_name(const std::string& kind, const std::filesystem::path& path, const std::string& data) {
  return kind + ":" + path.filename().string() + "@" + sha256_hex(data).substr(0, 12);
}

// "a  b" -> "▁a▁b"
std::string with_markers(std::string_view s) {
  std::string out;
  for (const auto& w : text::split_whitespace(s)) out += kMarker + w;
  return out;
}

std::string strip_markers(std::span<const std::string> tokens) {
  std::string joined;
  for (const auto& t : tokens) joined += t;
  std::string out;
  std::size_t pos = 0;
  while (pos < joined.size()) {
    if (joined.compare(pos, kMarker.size(), kMarker) == 0) {
      if (!out.empty()) out += ' ';
      pos += kMarker.size();
    } else {
      out += joined[pos++];
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> WhitespaceTokenizer::tokenize(std::string_view s) const {
  return text::split_whitespace(s);
}

std::string WhitespaceTokenizer::detokenize(std::span<const std::string> tokens) const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

UnigramTokenizer::UnigramTokenizer(std::vector<std::pair<std::string, double>> pieces, std::string name)
    : name_(std::move(name)) {
  double min_score = 0.0;
  for (auto& [piece, score] : pieces) {
    auto cps = text::decode_utf8(piece);
    if (cps.empty()) continue;
    max_len_ = std::max(max_len_, cps.size());
    min_score = std::min(min_score, score);
    scores_.emplace(std::move(cps), score);
  }
  if (scores_.empty()) throw std::invalid_argument("unigram model has no pieces");
  unk_score_ = min_score - 10.0;
}

UnigramTokenizer UnigramTokenizer::load(const std::filesystem::path& path) {
  const auto data = read_file(path);
  std::vector<std::pair<std::string, double>> pieces;
  std::size_t lineno = 0;
  for (const auto& line : lines_of(data)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected piece<TAB>score");
    }
    auto piece = line.substr(0, tab);
    // Control symbols such as <unk>, <s>, </s> never appear in segmentations.
    if (piece.size() > 2 && piece.front() == '<' && piece.back() == '>') continue;
    double score = 0.0;
    try {
      score = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": bad score");
    }
    pieces.emplace_back(std::move(piece), score);
  }
  return UnigramTokenizer(std::move(pieces), model_name("unigram", path, data));
}

std::vector<std::string> UnigramTokenizer::tokenize(std::string_view s) const {
  const auto cps = text::decode_utf8(with_markers(s));
  const std::size_t n = cps.size();
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, neg_inf);
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  for (std::size_t end = 1; end <= n; ++end) {
    const std::size_t lo = end > max_len_ ? end - max_len_ : 0;
    for (std::size_t start = lo; start < end; ++start) {
      if (best[start] == neg_inf) continue;
      double piece_score;
      auto it = scores_.find(cps.substr(start, end - start));
      if (it != scores_.end()) {
        piece_score = it->second;
      } else if (end - start == 1) {
        piece_score = unk_score_;
      } else {
        continue;
      }
      const double cand = best[start] + piece_score;
      // Strict comparison keeps the earliest (longest leading) split on ties.
      if (cand > best[end]) {
        best[end] = cand;
        back[end] = start;
      }
    }
  }
  std::vector<std::string> out;
  for (std::size_t end = n; end > 0; end = back[end]) {
    out.push_back(text::encode_utf8(std::u32string_view(cps).substr(back[end], end - back[end])));
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string UnigramTokenizer::detokenize(std::span<const std::string> tokens) const {
  return strip_markers(tokens);
}

BpeTokenizer::BpeTokenizer(std::vector<std::pair<std::string, std::string>> merges, std::string name)
    : name_(std::move(name)) {
  for (std::size_t i = 0; i < merges.size(); ++i) ranks_.emplace(std::move(merges[i]), i);
}

BpeTokenizer BpeTokenizer::load(const std::filesystem::path& path) {
  const auto data = read_file(path);
  std::vector<std::pair<std::string, std::string>> merges;
  std::size_t lineno = 0;
  for (const auto& line : lines_of(data)) {
    ++lineno;
    if (line.empty() || line.rfind("#version", 0) == 0) continue;
    const auto parts = text::split_whitespace(line);
    if (parts.size() != 2) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected two symbols");
    }
    merges.emplace_back(parts[0], parts[1]);
  }
  return BpeTokenizer(std::move(merges), model_name("bpe", path, data));
}

std::vector<std::string> BpeTokenizer::tokenize(std::string_view s) const {
  std::vector<std::string> out;
  for (const auto& w : text::split_whitespace(s)) {
    std::vector<std::string> syms;
    const auto cps = text::decode_utf8(w);
    for (std::size_t i = 0; i < cps.size(); ++i) {
      auto sym = text::encode_utf8(std::u32string_view(cps).substr(i, 1));
      syms.push_back(i == 0 ? kMarker + sym : sym);
    }
    while (syms.size() > 1) {
      std::size_t best_rank = std::numeric_limits<std::size_t>::max();
      std::size_t best_i = 0;
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        auto it = ranks_.find({syms[i], syms[i + 1]});
        if (it != ranks_.end() && it->second < best_rank) {
          best_rank = it->second;
          best_i = i;
        }
      }
      if (best_rank == std::numeric_limits<std::size_t>::max()) break;
      syms[best_i] += syms[best_i + 1];
      syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(best_i) + 1);
    }
    out.insert(out.end(), syms.begin(), syms.end());
  }
  return out;
}

std::string BpeTokenizer::detokenize(std::span<const std::string> tokens) const {
  return strip_markers(tokens);
}

std::shared_ptr<const SubwordTokenizer> load_tokenizer(const std::filesystem::path& path) {
  if (path.empty()) return std::make_shared<WhitespaceTokenizer>();
  if (path.extension() == ".vocab") return std::make_shared<UnigramTokenizer>(UnigramTokenizer::load(path));
  return std::make_shared<BpeTokenizer>(BpeTokenizer::load(path));
}

}  // namespace ragmt::metrics
