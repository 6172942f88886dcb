#pragma once

#include <cstddef>
#include <string_view>

namespace ragmt::retrieval {

// Unit-cost edit distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

// 1 - distance / max(|a|, |b|); 1.0 when both are empty.
double normalized_levenshtein(std::u32string_view a, std::u32string_view b);
double normalized_levenshtein(std::string_view a, std::string_view b);

}  // namespace ragmt::retrieval
