#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ragmt {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Origin { NT, OT, Grammar };

std::string_view to_string(Origin o);
Origin parse_origin(std::string_view s);

struct VerseRef {
  std::string book;
  int chapter = 1;
  int verse = 1;
  // Trailing segment marker for split verses ("GEN.1.1a" -> "a").
  std::string segment;

  // Parses "BOOK.C.V", "BOOK C:V" and "BOOK.C.Vsuffix".
  static std::optional<VerseRef> parse(std::string_view s);
  std::string to_string() const;  // "GEN.1.1"
  bool operator==(const VerseRef&) const = default;
};

struct ParallelPair {
  std::string id;
  std::string source_text;
  std::string target_text;
  Origin origin = Origin::NT;
  std::optional<VerseRef> ref;

  bool operator==(const ParallelPair&) const = default;
};

struct LexiconEntry {
  std::string source_word;
  std::optional<std::string> pos;
  std::string target_word;

  bool operator==(const LexiconEntry&) const = default;
};

enum class FileFormat { TSV, JSONL };

FileFormat parse_format(std::string_view s);
// Picks JSONL for *.jsonl / *.json, TSV otherwise.
FileFormat guess_format(const std::filesystem::path& path);

std::vector<ParallelPair> parse_parallel(std::string_view content, FileFormat format);
std::vector<ParallelPair> load_parallel(const std::filesystem::path& path, FileFormat format);
std::vector<ParallelPair> load_parallel(const std::filesystem::path& path);
std::string serialize_parallel(std::span<const ParallelPair> pairs, FileFormat format);
void save_parallel(const std::filesystem::path& path, std::span<const ParallelPair> pairs,
                   FileFormat format);

std::vector<LexiconEntry> parse_lexicon(std::string_view content, FileFormat format);
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
std::string serialize_lexicon(std::span<const LexiconEntry> entries, FileFormat format);

/// Immutable pairs + lexicon with unique ids.
class CorpusStore {
 public:
  CorpusStore() = default;
  CorpusStore(std::vector<ParallelPair> pairs, std::vector<LexiconEntry> lexicon);

  const std::vector<ParallelPair>& pairs() const { return pairs_; }
  const std::vector<LexiconEntry>& lexicon() const { return lexicon_; }
  const ParallelPair* find(std::string_view id) const;

  // Content hash over all pairs and lexicon entries, order-sensitive.
  std::string content_hash() const;

 private:
  std::vector<ParallelPair> pairs_;
  std::vector<LexiconEntry> lexicon_;
};

std::string content_hash(std::span<const ParallelPair> pairs);
std::string content_hash(std::span<const LexiconEntry> entries);

/// Deterministic permutation of 0..n-1 (mt19937_64, Fisher-Yates).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

struct PartitionSpec {
  double train_fraction = 0.95;
  std::string test_book = "Genesis";
  int test_verses = 500;
  std::uint64_t seed = 0;
};

struct Partition {
  std::vector<ParallelPair> train;
  std::vector<ParallelPair> validation;
  std::vector<ParallelPair> test;
};

/// NT pairs are shuffled under `seed` and split by `train_fraction`; the test
/// set is the first `test_verses` distinct verses of `test_book` among the OT
/// pairs, in (chapter, verse) order.
Partition partition(std::span<const ParallelPair> pairs, const PartitionSpec& spec);

// Test selector on its own (also used by the pipeline).
std::vector<ParallelPair> select_test(std::span<const ParallelPair> pairs, std::string_view book,
                                      int max_verses);

// True if `book` names the same book as `ref_book` ("Genesis" ~ "GEN" ~ "gen").
bool book_matches(std::string_view book, std::string_view ref_book);

std::string normalize_for_leakage(std::string_view s);

struct LeakageCollision {
  std::string test_id;
  std::string aux_id;
  bool source_match = false;
  bool target_match = false;
};

struct LeakageReport {
  std::vector<LeakageCollision> collisions;
  bool clean() const { return collisions.empty(); }
};

LeakageReport leakage_check(std::span<const ParallelPair> test, std::span<const ParallelPair> aux);

}  // namespace ragmt
