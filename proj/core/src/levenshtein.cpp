#include "ragmt/levenshtein.hpp"

#include <algorithm>
#include <vector>

#include "ragmt/text.hpp"

namespace ragmt::retrieval {

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double normalized_levenshtein(std::u32string_view a, std::u32string_view b) {
  const auto longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(longest);
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
  return normalized_levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

}  // namespace ragmt::retrieval
