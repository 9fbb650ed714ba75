#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace protorel {

// Maximum-weight assignment on a rows x cols matrix of non-negative integer
// weights (Hungarian method with potentials, O(n^3)). Returns, for each row,
// the assigned column or -1. The matrix is padded to square internally, so
// every row of the smaller side is assigned; a zero-weight assignment is
// reported as -1 since it carries no pairing.
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<std::int64_t>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w.front().size() : 0;
  const std::size_t n = std::max(rows, cols);
  std::vector<int> result(rows, -1);
  if (n == 0) return result;

  std::int64_t top = 0;
  for (const auto& r : w)
    for (auto x : r) top = std::max(top, x);
  auto cost = [&](std::size_t i, std::size_t j) -> std::int64_t {
    if (i >= rows || j >= cols) return top;
    return top - w[i][j];
  };

  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based arrays; p[j] is the row matched to column j, 0 for none.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<std::int64_t> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      std::int64_t delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols && w[i][j - 1] > 0) result[i] = static_cast<int>(j - 1);
  }
  return result;
}

// Maximum-cardinality bipartite matching by augmenting paths. `edge(i, j)`
// tells whether left i may pair with right j. Returns right partner per left
// vertex, -1 when unmatched.
inline std::vector<int> max_bipartite_matching(std::size_t left, std::size_t right,
                                               const std::function<bool(std::size_t, std::size_t)>& edge) {
  std::vector<std::vector<std::size_t>> adj(left);
  for (std::size_t i = 0; i < left; ++i)
    for (std::size_t j = 0; j < right; ++j)
      if (edge(i, j)) adj[i].push_back(j);

  std::vector<int> match_l(left, -1), match_r(right, -1);
  std::vector<bool> seen;
  auto augment = [&](auto&& self, std::size_t i) -> bool {
    for (std::size_t j : adj[i]) {
      if (seen[j]) continue;
      seen[j] = true;
      if (match_r[j] < 0 || self(self, static_cast<std::size_t>(match_r[j]))) {
        match_l[i] = static_cast<int>(j);
        match_r[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  for (std::size_t i = 0; i < left; ++i) {
    seen.assign(right, false);
    augment(augment, i);
  }
  return match_l;
}

// Matching that saturates every left vertex, if one exists.
inline std::optional<std::vector<std::size_t>> left_saturating_matching(
    std::size_t left, std::size_t right, const std::function<bool(std::size_t, std::size_t)>& edge) {
  if (left > right) return std::nullopt;
  const auto m = max_bipartite_matching(left, right, edge);
  std::vector<std::size_t> out;
  out.reserve(left);
  for (int j : m) {
    if (j < 0) return std::nullopt;
    out.push_back(static_cast<std::size_t>(j));
  }
  return out;
}

}  // namespace protorel
