#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

#include "cellac/text.hpp"

namespace cellac {

/// Levenshtein distance (unit insert/delete/substitute) over any random-access
/// sequence. Two-row DP, O(|a|·|b|) time, O(min(|a|,|b|)) space.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  if (a.size() < b.size()) return levenshtein(b, a);
  const std::size_t n = b.size();
  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      std::size_t up = row[j];
      if (a[i - 1] == b[j - 1]) {
        row[j] = diag;
      } else {
        row[j] = 1 + std::min({diag, up, row[j - 1]});
      }
      diag = up;
    }
  }
  return row[n];
}

/// 1 - dist/max(|a|,|b|) over code points. Both empty -> 1.
inline double edit_sim(std::string_view a, std::string_view b) {
  auto ua = utf8_decode(a);
  auto ub = utf8_decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

}  // namespace cellac
