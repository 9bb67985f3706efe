#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace cellac {

struct Matching {
  double total = 0.0;
  /// row -> column, or -1 when the row is unmatched (or matched with weight 0).
  std::vector<int> assignment;
};

/// Maximum-weight bipartite matching on a rectangular, nonnegative weight
/// matrix (rows x cols). Zero weight means "no edge". Kuhn-Munkres on the
/// square padding of the matrix, O(n^3).
template <typename Matrix>
Matching max_weight_matching(const Matrix& weights) {
  Matching result;
  const std::size_t rows = weights.size();
  std::size_t cols = 0;
  for (const auto& r : weights) cols = std::max(cols, static_cast<std::size_t>(r.size()));
  result.assignment.assign(rows, -1);
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return result;

  double wmax = 0.0;
  for (const auto& r : weights)
    for (double w : r) wmax = std::max(wmax, w);
  auto cost = [&](std::size_t i, std::size_t j) {
    double w = (i < rows && j < weights[i].size()) ? static_cast<double>(weights[i][j]) : 0.0;
    return wmax - w;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      std::size_t i0 = p[j0], j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = p[j];
    if (i == 0 || i > rows || j > weights[i - 1].size()) continue;
    double w = static_cast<double>(weights[i - 1][j - 1]);
    if (w > 0.0) {
      result.assignment[i - 1] = static_cast<int>(j - 1);
      result.total += w;
    }
  }
  return result;
}

}  // namespace cellac
