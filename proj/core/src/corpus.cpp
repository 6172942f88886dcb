#include "ragmt/corpus.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <nlohmann/json.hpp>

#include "ragmt/hash.hpp"
#include "ragmt/text.hpp"

namespace ragmt {

using nlohmann::json;

namespace {

struct BookName {
  std::string_view code;
  std::string_view name;
};

// USFM codes and their common English names.
constexpr std::array<BookName, 66> kBooks{{
    {"GEN", "Genesis"},       {"EXO", "Exodus"},          {"LEV", "Leviticus"},
    {"NUM", "Numbers"},       {"DEU", "Deuteronomy"},     {"JOS", "Joshua"},
    {"JDG", "Judges"},        {"RUT", "Ruth"},            {"1SA", "1 Samuel"},
    {"2SA", "2 Samuel"},      {"1KI", "1 Kings"},         {"2KI", "2 Kings"},
    {"1CH", "1 Chronicles"},  {"2CH", "2 Chronicles"},    {"EZR", "Ezra"},
    {"NEH", "Nehemiah"},      {"EST", "Esther"},          {"JOB", "Job"},
    {"PSA", "Psalms"},        {"PRO", "Proverbs"},        {"ECC", "Ecclesiastes"},
    {"SNG", "Song of Songs"}, {"ISA", "Isaiah"},          {"JER", "Jeremiah"},
    {"LAM", "Lamentations"},  {"EZK", "Ezekiel"},         {"DAN", "Daniel"},
    {"HOS", "Hosea"},         {"JOL", "Joel"},            {"AMO", "Amos"},
    {"OBA", "Obadiah"},       {"JON", "Jonah"},           {"MIC", "Micah"},
    {"NAM", "Nahum"},         {"HAB", "Habakkuk"},        {"ZEP", "Zephaniah"},
    {"HAG", "Haggai"},        {"ZEC", "Zechariah"},       {"MAL", "Malachi"},
    {"MAT", "Matthew"},       {"MRK", "Mark"},            {"LUK", "Luke"},
    {"JHN", "John"},          {"ACT", "Acts"},            {"ROM", "Romans"},
    {"1CO", "1 Corinthians"}, {"2CO", "2 Corinthians"},   {"GAL", "Galatians"},
    {"EPH", "Ephesians"},     {"PHP", "Philippians"},     {"COL", "Colossians"},
    {"1TH", "1 Thessalonians"}, {"2TH", "2 Thessalonians"}, {"1TI", "1 Timothy"},
    {"2TI", "2 Timothy"},     {"TIT", "Titus"},           {"PHM", "Philemon"},
    {"HEB", "Hebrews"},       {"JAS", "James"},           {"1PE", "1 Peter"},
    {"2PE", "2 Peter"},       {"1JN", "1 John"},          {"2JN", "2 John"},
    {"3JN", "3 John"},        {"JUD", "Jude"},            {"REV", "Revelation"},
}};

std::string canonical_book(std::string_view book) {
  const std::string low = text::lowercase(text::trim(book));
  for (const auto& b : kBooks) {
    if (low == text::lowercase(b.code) || low == text::lowercase(b.name)) {
      return std::string(b.code);
    }
  }
  return low;
}

std::optional<int> parse_positive(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || v < 1) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Iterates lines, yielding (1-based line number, line without trailing \r).
template <typename Fn>
void for_each_line(std::string_view content, Fn&& fn) {
  std::size_t start = 0;
  int line_no = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    auto line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    fn(line_no, line);
    start = end + 1;
  }
}

bool blank(std::string_view line) { return text::trim(line).empty(); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw CorpusError(what + " at line " + std::to_string(line));
}

ParallelPair make_pair(int line, std::string id, std::string source, std::string target,
                       std::string_view origin, std::optional<std::string_view> ref_field) {
  ParallelPair p;
  p.id = text::trim(id);
  if (p.id.empty()) fail_at(line, "empty id");
  p.source_text = std::move(source);
  p.target_text = std::move(target);
  if (text::trim(p.source_text).empty()) fail_at(line, "empty source_text");
  if (text::trim(p.target_text).empty()) fail_at(line, "empty target_text");
  try {
    p.origin = parse_origin(origin);
  } catch (const CorpusError&) {
    fail_at(line, "invalid origin '" + std::string(origin) + "'");
  }
  if (ref_field.has_value()) {
    const auto r = text::trim(*ref_field);
    if (!r.empty()) {
      p.ref = VerseRef::parse(r);
      if (!p.ref) fail_at(line, "invalid ref '" + r + "'");
    }
  } else {
    p.ref = VerseRef::parse(p.id);
  }
  return p;
}

void check_unique_ids(const std::vector<ParallelPair>& pairs, const std::vector<int>& lines) {
  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [it, inserted] = seen.emplace(pairs[i].id, lines[i]);
    if (!inserted) {
      throw CorpusError("duplicate id '" + pairs[i].id + "' at lines " +
                        std::to_string(it->second) + " and " + std::to_string(lines[i]));
    }
  }
}

std::string json_string_field(const json& obj, const char* name, int line, bool required) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    if (required) fail_at(line, std::string("missing field '") + name + "'");
    return {};
  }
  if (!it->is_string()) fail_at(line, std::string("field '") + name + "' is not a string");
  return it->get<std::string>();
}

void check_no_tabs(std::string_view field, std::string_view name) {
  if (field.find_first_of("\t\n\r") != std::string_view::npos) {
    throw CorpusError("cannot write " + std::string(name) + " containing tab or newline as TSV");
  }
}

}  // namespace

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::NT: return "NT";
    case Origin::OT: return "OT";
    case Origin::Grammar: return "GRAMMAR";
  }
  return "NT";
}

Origin parse_origin(std::string_view s) {
  const auto u = text::lowercase(text::trim(s));
  if (u == "nt") return Origin::NT;
  if (u == "ot") return Origin::OT;
  if (u == "grammar") return Origin::Grammar;
  throw CorpusError("invalid origin '" + std::string(s) + "'");
}

std::optional<VerseRef> VerseRef::parse(std::string_view s) {
  std::string_view book;
  std::string_view chapter;
  std::string_view verse;
  if (auto parts = split_char(s, '.'); parts.size() == 3) {
    book = parts[0];
    chapter = parts[1];
    verse = parts[2];
  } else if (auto sp = s.rfind(' '); sp != std::string_view::npos) {
    book = s.substr(0, sp);
    auto cv = split_char(s.substr(sp + 1), ':');
    if (cv.size() != 2) return std::nullopt;
    chapter = cv[0];
    verse = cv[1];
  } else {
    return std::nullopt;
  }
  if (book.empty()) return std::nullopt;
  VerseRef r;
  r.book = std::string(book);
  auto c = parse_positive(chapter);
  if (!c) return std::nullopt;
  r.chapter = *c;
  std::size_t digits = 0;
  while (digits < verse.size() && verse[digits] >= '0' && verse[digits] <= '9') ++digits;
  auto v = parse_positive(verse.substr(0, digits));
  if (!v) return std::nullopt;
  r.verse = *v;
  r.segment = std::string(verse.substr(digits));
  return r;
}

std::string VerseRef::to_string() const {
  return book + "." + std::to_string(chapter) + "." + std::to_string(verse) + segment;
}

FileFormat parse_format(std::string_view s) {
  const auto l = text::lowercase(s);
  if (l == "tsv") return FileFormat::TSV;
  if (l == "jsonl") return FileFormat::JSONL;
  throw CorpusError("unknown format '" + std::string(s) + "' (expected tsv or jsonl)");
}

FileFormat guess_format(const std::filesystem::path& path) {
  const auto ext = text::lowercase(path.extension().string());
  return (ext == ".jsonl" || ext == ".json") ? FileFormat::JSONL : FileFormat::TSV;
}

std::vector<ParallelPair> parse_parallel(std::string_view content, FileFormat format) {
  std::vector<ParallelPair> pairs;
  std::vector<int> lines;
  bool first = true;
  for_each_line(content, [&](int line_no, std::string_view line) {
    const bool is_first = std::exchange(first, false);
    if (blank(line)) return;
    if (format == FileFormat::TSV) {
      auto cols = split_char(line, '\t');
      if (is_first && text::lowercase(cols[0]) == "id") return;  // header
      if (cols.size() != 4 && cols.size() != 5) {
        fail_at(line_no, "expected 4 or 5 tab-separated fields, got " + std::to_string(cols.size()));
      }
      std::optional<std::string_view> ref;
      if (cols.size() == 5) ref = cols[4];
      pairs.push_back(make_pair(line_no, std::string(cols[0]), std::string(cols[1]),
                                std::string(cols[2]), cols[3], ref));
    } else {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        fail_at(line_no, std::string("malformed JSON (") + e.what() + ")");
      }
      if (!obj.is_object()) fail_at(line_no, "expected a JSON object");
      const auto origin = json_string_field(obj, "origin", line_no, true);
      std::optional<std::string> ref;
      if (obj.contains("ref")) ref = json_string_field(obj, "ref", line_no, false);
      std::optional<std::string_view> ref_view;
      if (ref) ref_view = *ref;
      pairs.push_back(make_pair(line_no, json_string_field(obj, "id", line_no, true),
                                json_string_field(obj, "source", line_no, true),
                                json_string_field(obj, "target", line_no, true), origin, ref_view));
    }
    lines.push_back(line_no);
  });
  check_unique_ids(pairs, lines);
  return pairs;
}

std::vector<ParallelPair> load_parallel(const std::filesystem::path& path, FileFormat format) {
  try {
    return parse_parallel(read_file(path), format);
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

std::vector<ParallelPair> load_parallel(const std::filesystem::path& path) {
  return load_parallel(path, guess_format(path));
}

std::string serialize_parallel(std::span<const ParallelPair> pairs, FileFormat format) {
  std::string out;
  for (const auto& p : pairs) {
    if (format == FileFormat::TSV) {
      check_no_tabs(p.id, "id");
      check_no_tabs(p.source_text, "source_text");
      check_no_tabs(p.target_text, "target_text");
      out += p.id + '\t' + p.source_text + '\t' + p.target_text + '\t' +
             std::string(to_string(p.origin)) + '\t' + (p.ref ? p.ref->to_string() : "") + '\n';
    } else {
      json obj{{"id", p.id},
               {"source", p.source_text},
               {"target", p.target_text},
               {"origin", to_string(p.origin)},
               {"ref", p.ref ? json(p.ref->to_string()) : json(nullptr)}};
      out += obj.dump() + '\n';
    }
  }
  return out;
}

void save_parallel(const std::filesystem::path& path, std::span<const ParallelPair> pairs,
                   FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write " + path.string());
  out << serialize_parallel(pairs, format);
}

std::vector<LexiconEntry> parse_lexicon(std::string_view content, FileFormat format) {
  std::vector<LexiconEntry> entries;
  std::map<std::tuple<std::string, std::string, std::string>, int> seen;
  bool first = true;
  for_each_line(content, [&](int line_no, std::string_view line) {
    const bool is_first = std::exchange(first, false);
    if (blank(line)) return;
    LexiconEntry e;
    std::string pos;
    if (format == FileFormat::TSV) {
      auto cols = split_char(line, '\t');
      if (is_first && text::lowercase(cols[0]) == "source_word") return;
      if (cols.size() == 2) {
        e.source_word = text::trim(cols[0]);
        e.target_word = text::trim(cols[1]);
      } else if (cols.size() == 3) {
        e.source_word = text::trim(cols[0]);
        pos = text::trim(cols[1]);
        e.target_word = text::trim(cols[2]);
      } else {
        fail_at(line_no, "expected 2 or 3 tab-separated fields, got " + std::to_string(cols.size()));
      }
    } else {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& ex) {
        fail_at(line_no, std::string("malformed JSON (") + ex.what() + ")");
      }
      if (!obj.is_object()) fail_at(line_no, "expected a JSON object");
      e.source_word = text::trim(json_string_field(obj, "source_word", line_no, true));
      pos = text::trim(json_string_field(obj, "pos", line_no, false));
      e.target_word = text::trim(json_string_field(obj, "target_word", line_no, true));
    }
    if (e.source_word.empty()) fail_at(line_no, "empty source_word");
    if (e.target_word.empty()) fail_at(line_no, "empty target_word");
    if (!pos.empty()) e.pos = pos;
    auto [it, inserted] = seen.emplace(std::make_tuple(e.source_word, pos, e.target_word), line_no);
    if (!inserted) {
      throw CorpusError("duplicate lexicon entry '" + e.source_word + "' -> '" + e.target_word +
                        "' at lines " + std::to_string(it->second) + " and " +
                        std::to_string(line_no));
    }
    entries.push_back(std::move(e));
  });
  return entries;
}

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  try {
    return parse_lexicon(read_file(path), guess_format(path));
  } catch (const CorpusError& e) {
    throw CorpusError(path.string() + ": " + e.what());
  }
}

std::string serialize_lexicon(std::span<const LexiconEntry> entries, FileFormat format) {
  std::string out;
  for (const auto& e : entries) {
    if (format == FileFormat::TSV) {
      check_no_tabs(e.source_word, "source_word");
      check_no_tabs(e.target_word, "target_word");
      out += e.source_word + '\t' + e.pos.value_or("") + '\t' + e.target_word + '\n';
    } else {
      json obj{{"source_word", e.source_word},
               {"pos", e.pos ? json(*e.pos) : json(nullptr)},
               {"target_word", e.target_word}};
      out += obj.dump() + '\n';
    }
  }
  return out;
}

CorpusStore::CorpusStore(std::vector<ParallelPair> pairs, std::vector<LexiconEntry> lexicon)
    : pairs_(std::move(pairs)), lexicon_(std::move(lexicon)) {
  std::set<std::string_view> ids;
  for (const auto& p : pairs_) {
    if (!ids.insert(p.id).second) throw CorpusError("duplicate id '" + p.id + "' in corpus store");
  }
}

const ParallelPair* CorpusStore::find(std::string_view id) const {
  auto it = std::find_if(pairs_.begin(), pairs_.end(), [&](const auto& p) { return p.id == id; });
  return it == pairs_.end() ? nullptr : &*it;
}

std::string CorpusStore::content_hash() const {
  Sha256 h;
  h.field(ragmt::content_hash(pairs_)).field(ragmt::content_hash(lexicon_));
  return h.hex();
}

std::string content_hash(std::span<const ParallelPair> pairs) {
  Sha256 h;
  for (const auto& p : pairs) {
    h.field(p.id).field(p.source_text).field(p.target_text).field(to_string(p.origin));
    h.field(p.ref ? p.ref->to_string() : "");
  }
  return h.hex();
}

std::string content_hash(std::span<const LexiconEntry> entries) {
  Sha256 h;
  for (const auto& e : entries) {
    h.field(e.source_word).field(e.pos.value_or("")).field(e.target_word);
  }
  return h.hex();
}

bool book_matches(std::string_view book, std::string_view ref_book) {
  return canonical_book(book) == canonical_book(ref_book);
}

std::vector<ParallelPair> select_test(std::span<const ParallelPair> pairs, std::string_view book,
                                      int max_verses) {
  std::vector<const ParallelPair*> hits;
  for (const auto& p : pairs) {
    if (p.origin == Origin::OT && p.ref && book_matches(book, p.ref->book)) hits.push_back(&p);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto* a, const auto* b) {
    return std::tie(a->ref->chapter, a->ref->verse) < std::tie(b->ref->chapter, b->ref->verse);
  });
  std::vector<ParallelPair> out;
  int verses = 0;
  std::pair<int, int> last{-1, -1};
  for (const auto* p : hits) {
    const std::pair<int, int> cv{p->ref->chapter, p->ref->verse};
    if (cv != last) {
      if (verses == max_verses) break;
      ++verses;
      last = cv;
    }
    out.push_back(*p);
  }
  return out;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  if (n < 2) return perm;
  // Fisher-Yates with explicit rejection sampling, so the result does not
  // depend on the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::uint64_t bound = i + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = 0;
    do {
      r = rng();
    } while (r >= limit);
    std::swap(perm[i], perm[r % bound]);
  }
  return perm;
}

Partition partition(std::span<const ParallelPair> pairs, const PartitionSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw CorpusError("train_fraction must lie in (0,1), got " + std::to_string(spec.train_fraction));
  }
  if (spec.test_verses < 1) throw CorpusError("test verse count must be positive");

  std::vector<std::size_t> nt;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].origin == Origin::NT) nt.push_back(i);
  }
  if (nt.empty()) throw CorpusError("no in-domain (NT) pairs to partition");

  const auto perm = seeded_permutation(nt.size(), spec.seed);
  std::vector<std::size_t> shuffled(nt.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = nt[perm[i]];
  nt = std::move(shuffled);

  auto n_train = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(nt.size())));
  n_train = std::min(n_train, nt.size());
  std::vector<std::size_t> train_idx(nt.begin(), nt.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> val_idx(nt.begin() + static_cast<std::ptrdiff_t>(n_train), nt.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  Partition out;
  for (auto i : train_idx) out.train.push_back(pairs[i]);
  for (auto i : val_idx) out.validation.push_back(pairs[i]);
  out.test = select_test(pairs, spec.test_book, spec.test_verses);
  if (out.test.empty()) {
    throw CorpusError("test selector (" + spec.test_book + ", " + std::to_string(spec.test_verses) +
                      ") matched zero OT pairs");
  }
  return out;
}

std::string normalize_for_leakage(std::string_view s) {
  return text::trim(text::strip_punct(text::collapse_whitespace(text::lowercase(s))));
}

LeakageReport leakage_check(std::span<const ParallelPair> test, std::span<const ParallelPair> aux) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_source;
  std::unordered_map<std::string, std::vector<std::size_t>> by_target;
  for (std::size_t i = 0; i < aux.size(); ++i) {
    by_source[normalize_for_leakage(aux[i].source_text)].push_back(i);
    by_target[normalize_for_leakage(aux[i].target_text)].push_back(i);
  }
  LeakageReport report;
  for (const auto& t : test) {
    std::map<std::size_t, LeakageCollision> hits;
    if (auto it = by_source.find(normalize_for_leakage(t.source_text)); it != by_source.end()) {
      for (auto i : it->second) hits[i].source_match = true;
    }
    if (auto it = by_target.find(normalize_for_leakage(t.target_text)); it != by_target.end()) {
      for (auto i : it->second) hits[i].target_match = true;
    }
    for (auto& [i, c] : hits) {
      c.test_id = t.id;
      c.aux_id = aux[i].id;
      report.collisions.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace ragmt
