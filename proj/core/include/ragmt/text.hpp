#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ragmt::text {

// UTF-8 <-> code points. Malformed sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

// Whitespace as understood by Python's str.split(): the separators used by
// the canonical chrF scorer.
bool is_space(char32_t cp);

// ASCII punctuation (string.punctuation).
bool is_ascii_punct(char32_t cp);

// ASCII punctuation plus the common Latin-1 and General Punctuation marks
// (quotes, dashes, ellipsis, guillemets, inverted marks).
bool is_punct(char32_t cp);

// Simple case folding for Latin, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t to_lower(char32_t cp);
std::string lowercase(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);
std::string strip_punct(std::string_view s);

// Code point length of a UTF-8 string.
std::size_t length(std::string_view s);

/// Word tokenizer shared by analysis and retrieval: lowercase, split on
/// Unicode whitespace, strip leading/trailing punctuation, drop empty tokens.
class WordTokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view s) const;
  std::string normalize_token(std::string_view token) const;
  static constexpr std::string_view name() { return "lower+whitespace+strip-punct"; }
};

}  // namespace ragmt::text
